#include "qnet/estimators.hpp"

#include <algorithm>
#include <string>

#include "qnet/errors.hpp"

namespace qnet {

void NodeMoments::push(double x) {
    const double n1 = static_cast<double>(count);
    count += 1;
    const double n = static_cast<double>(count);
    const double delta = x - mean;
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2 - 4.0 * delta_n * m3;
    m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2;
    m2 += term1;
    mean += delta_n;
}

void NodeMoments::merge(const NodeMoments& other) {
    if (other.count == 0) return;
    if (count == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const double n = na + nb;
    const double delta = other.mean - mean;
    const double delta2 = delta * delta;
    const double delta3 = delta2 * delta;
    const double delta4 = delta2 * delta2;

    const double new_m4 = m4 + other.m4 + delta4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                          6.0 * delta2 * (na * na * other.m2 + nb * nb * m2) / (n * n) +
                          4.0 * delta * (na * other.m3 - nb * m3) / n;
    const double new_m3 = m3 + other.m3 + delta3 * na * nb * (na - nb) / (n * n) +
                          3.0 * delta * (na * other.m2 - nb * m2) / n;
    const double new_m2 = m2 + other.m2 + delta2 * na * nb / n;

    mean += delta * nb / n;
    m2 = new_m2;
    m3 = new_m3;
    m4 = new_m4;
    count += other.count;
}

EstimatorState::EstimatorState(NetworkTopology topology) : topology_(std::move(topology)) {
    col_offset_.reserve(static_cast<std::size_t>(topology_.columns()) + 1);
    col_offset_.push_back(0);
    for (int j = 1; j <= topology_.columns(); ++j) {
        col_offset_.push_back(col_offset_.back() + topology_.column_size(j));
    }
    nodes_.assign(static_cast<std::size_t>(col_offset_.back()), NodeMoments{});
}

const NodeMoments& EstimatorState::node(int row, int col) const {
    if (!topology_.node_exists(row, col)) {
        throw NodeAbsent("estimator: no machine (" + std::to_string(row) + "," +
                         std::to_string(col) + ")");
    }
    return nodes_[static_cast<std::size_t>(col_offset_[static_cast<std::size_t>(col) - 1] + row - 1)];
}

void EstimatorState::update(const Observation& obs) {
    check_path(obs.path, topology_);
    for (int j = 1; j <= topology_.columns(); ++j) {
        nodes_[static_cast<std::size_t>(col_offset_[static_cast<std::size_t>(j) - 1] + obs.path[j] - 1)]
            .push(obs.quality);
    }
    n_ += 1;
}

void EstimatorState::merge(const EstimatorState& other) {
    if (topology_ != other.topology_) {
        throw TopologyMismatch("estimator merge: topologies differ");
    }
    for (std::size_t k = 0; k < nodes_.size(); ++k) nodes_[k].merge(other.nodes_[k]);
    n_ += other.n_;
}

Estimates EstimatorState::finalize() const {
    const auto rows = static_cast<std::size_t>(topology_.max_rows());
    const auto cols = static_cast<std::size_t>(topology_.columns());
    Estimates est{topology_, Matrix<double>(rows, cols), Matrix<double>(rows, cols),
                  Matrix<double>(rows, cols), Matrix<std::uint64_t>(rows, cols), n_};
    for (int j = 1; j <= topology_.columns(); ++j) {
        for (int i = 1; i <= topology_.column_size(j); ++i) {
            const NodeMoments& m = node(i, j);
            if (m.count == 0) continue;
            const auto r = static_cast<std::size_t>(i) - 1;
            const auto c = static_cast<std::size_t>(j) - 1;
            const double cnt = static_cast<double>(m.count);
            est.t(r, c) = m.mean;
            est.sigma(r, c) = m.m2 / cnt;  // population normalization
            // Nonnegative in exact arithmetic; clamp the rounding residue.
            est.tau2(r, c) = std::max(0.0, m.m4 / cnt - (m.m2 / cnt) * (m.m2 / cnt));
            est.counts(r, c) = m.count;
        }
    }
    return est;
}

EstimatorState accumulate(const NetworkTopology& topology, std::span<const Observation> obs) {
    EstimatorState state(topology);
    for (const Observation& o : obs) state.update(o);
    return state;
}

namespace {

void require_comparable(const Estimates& est, int col, int row) {
    if (!est.exists(row, col)) {
        throw NodeAbsent("no machine (" + std::to_string(row) + "," + std::to_string(col) + ")");
    }
    if (est.count(row, col) == 0) {
        throw NodeUnvisited("machine (" + std::to_string(row) + "," + std::to_string(col) +
                            ") has no observations");
    }
}

}  // namespace

double mean_difference(const Estimates& est, int col, int row, int row2) {
    require_comparable(est, col, row);
    require_comparable(est, col, row2);
    if (row == row2) return 0.0;
    return est.t(static_cast<std::size_t>(row) - 1, static_cast<std::size_t>(col) - 1) -
           est.t(static_cast<std::size_t>(row2) - 1, static_cast<std::size_t>(col) - 1);
}

double variance_difference(const Estimates& est, int col, int row, int row2) {
    require_comparable(est, col, row);
    require_comparable(est, col, row2);
    if (row == row2) return 0.0;
    return est.sigma(static_cast<std::size_t>(row) - 1, static_cast<std::size_t>(col) - 1) -
           est.sigma(static_cast<std::size_t>(row2) - 1, static_cast<std::size_t>(col) - 1);
}

}  // namespace qnet
