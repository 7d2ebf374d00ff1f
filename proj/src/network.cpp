#include "qnet/network.hpp"

#include <limits>
#include <numeric>
#include <string>

#include "qnet/errors.hpp"

namespace qnet {

int NetworkTopology::node_count() const {
    return std::accumulate(sizes_.begin(), sizes_.end(), 0);
}

NetworkTopology validate_topology(const std::vector<int>& column_sizes) {
    if (column_sizes.empty()) throw EmptyTopology();
    int max_rows = 0;
    for (std::size_t j = 0; j < column_sizes.size(); ++j) {
        if (column_sizes[j] < 1) {
            throw InvalidColumnSize("topology: column " + std::to_string(j + 1) + " has size " +
                                    std::to_string(column_sizes[j]) + ", must be >= 1");
        }
        max_rows = std::max(max_rows, column_sizes[j]);
    }
    NetworkTopology t;
    t.sizes_ = column_sizes;
    t.max_rows_ = max_rows;
    return t;
}

void check_path(const PathRecord& path, const NetworkTopology& topology) {
    if (static_cast<int>(path.machines.size()) != topology.columns()) {
        throw PathTopologyMismatch("path has " + std::to_string(path.machines.size()) +
                                   " entries, topology has " + std::to_string(topology.columns()) +
                                   " columns");
    }
    for (int j = 1; j <= topology.columns(); ++j) {
        const int i = path[j];
        if (i < 1 || i > topology.column_size(j)) {
            throw PathTopologyMismatch("machine index " + std::to_string(i) + " in column " +
                                       std::to_string(j) + " outside [1, " +
                                       std::to_string(topology.column_size(j)) + "]");
        }
    }
}

std::uint64_t path_count(const NetworkTopology& topology) {
    std::uint64_t product = 1;
    for (int size : topology.column_sizes()) {
        const auto s = static_cast<std::uint64_t>(size);
        if (product > std::numeric_limits<std::uint64_t>::max() / s) {
            throw OverflowError("path_count: product of column sizes exceeds 64-bit range");
        }
        product *= s;
    }
    return product;
}

PathRecord sample_path(const NetworkTopology& topology, RandomStream& rng) {
    PathRecord path;
    sample_path_into(topology, rng, path);
    return path;
}

void sample_path_into(const NetworkTopology& topology, RandomStream& rng, PathRecord& out) {
    out.machines.resize(static_cast<std::size_t>(topology.columns()));
    for (int j = 1; j <= topology.columns(); ++j) {
        const int r_j = topology.column_size(j);
        const double u = rng.uniform();
        out.machines[static_cast<std::size_t>(j) - 1] =
            1 + std::min(r_j - 1, static_cast<int>(u * r_j));
    }
}

PathRecord sample_path(const NetworkTopology& topology, const ColumnWeights& weights,
                       RandomStream& rng) {
    if (static_cast<int>(weights.size()) != topology.columns()) {
        throw TopologyMismatch("column weights: expected " + std::to_string(topology.columns()) +
                               " columns, got " + std::to_string(weights.size()));
    }
    PathRecord path;
    path.machines.reserve(static_cast<std::size_t>(topology.columns()));
    for (int j = 1; j <= topology.columns(); ++j) {
        const auto& w = weights[static_cast<std::size_t>(j) - 1];
        const int r_j = topology.column_size(j);
        if (static_cast<int>(w.size()) != r_j) {
            throw TopologyMismatch("column weights: column " + std::to_string(j) + " expects " +
                                   std::to_string(r_j) + " entries");
        }
        double total = 0.0;
        for (double v : w) {
            if (v < 0.0) throw Error("column weights must be nonnegative");
            total += v;
        }
        if (!(total > 0.0)) throw Error("column weights must have a positive sum");

        const double u = rng.uniform() * total;
        double cum = 0.0;
        int idx = r_j;  // lands here if rounding pushes u past the last edge
        for (int i = 1; i <= r_j; ++i) {
            cum += w[static_cast<std::size_t>(i) - 1];
            if (u < cum) {
                idx = i;
                break;
            }
        }
        path.machines.push_back(idx);
    }
    return path;
}

Matrix<std::uint8_t> indicator_matrix(const PathRecord& path, const NetworkTopology& topology) {
    check_path(path, topology);
    Matrix<std::uint8_t> m(static_cast<std::size_t>(topology.max_rows()),
                           static_cast<std::size_t>(topology.columns()));
    for (int j = 1; j <= topology.columns(); ++j) {
        m(static_cast<std::size_t>(path[j]) - 1, static_cast<std::size_t>(j) - 1) = 1;
    }
    return m;
}

}  // namespace qnet
