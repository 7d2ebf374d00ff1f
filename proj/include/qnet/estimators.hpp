#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qnet/quality_model.hpp"

namespace qnet {

// Streaming central moments up to order 4 (Welford-style single update,
// pairwise-combinable merge). Numerically stable at desk scale and the
// basis for parallel aggregation by sharding and merging.
struct NodeMoments {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;  // sum of squared deviations
    double m3 = 0.0;
    double m4 = 0.0;

    void push(double x);
    void merge(const NodeMoments& other);
};

// Point estimates per machine. Entries at unvisited machines and structural
// placeholders are 0 with count 0; that 0 is a formal placeholder, not an
// estimate, and the comparison operations below refuse such machines.
struct Estimates {
    NetworkTopology topology;
    Matrix<double> t;             // conditional sample mean of path quality
    Matrix<double> sigma;         // conditional population variance (1/count)
    Matrix<double> tau2;          // fourth-moment variance of the sigma entries
    Matrix<std::uint64_t> counts;
    std::uint64_t n = 0;

    bool exists(int row, int col) const { return topology.node_exists(row, col); }
    std::uint64_t count(int row, int col) const {
        return counts(static_cast<std::size_t>(row) - 1, static_cast<std::size_t>(col) - 1);
    }
};

// Mergeable accumulator of the per-machine visit counts and conditional
// moments of path quality over a fixed topology.
class EstimatorState {
public:
    EstimatorState() = default;
    explicit EstimatorState(NetworkTopology topology);

    // Routes the observation's quality into the moment accumulator of each
    // visited machine. Throws PathTopologyMismatch on an ill-fitting path.
    void update(const Observation& obs);

    // Combines with a state built over the same topology; equivalent, up to
    // floating-point rounding, to streaming the concatenated observations.
    // Throws TopologyMismatch.
    void merge(const EstimatorState& other);

    Estimates finalize() const;

    std::uint64_t total() const { return n_; }
    const NetworkTopology& topology() const { return topology_; }
    const NodeMoments& node(int row, int col) const;

private:
    NetworkTopology topology_;
    std::vector<NodeMoments> nodes_;  // packed by column
    std::vector<int> col_offset_;
    std::uint64_t n_ = 0;
};

inline EstimatorState init_state(const NetworkTopology& topology) {
    return EstimatorState(topology);
}

inline EstimatorState merge(EstimatorState a, const EstimatorState& b) {
    a.merge(b);
    return a;
}

// Serial accumulation of a whole dataset; the reference semantics that the
// OpenMP path in parallel.hpp must reproduce.
EstimatorState accumulate(const NetworkTopology& topology, std::span<const Observation> obs);

// T(row,col) - T(row2,col): a strongly consistent estimator of the
// difference of the two machines' mean quality contributions. Absolute
// levels are not identifiable from path sums; only within-column
// differences are. Throws NodeAbsent / NodeUnvisited.
double mean_difference(const Estimates& est, int col, int row, int row2);

// Sigma(row,col) - Sigma(row2,col), the analogous variance difference.
double variance_difference(const Estimates& est, int col, int row, int row2);

}  // namespace qnet
