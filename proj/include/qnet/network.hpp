#pragma once

#include <cstdint>
#include <vector>

#include "qnet/matrix.hpp"
#include "qnet/random.hpp"

namespace qnet {

// Layered workstation topology. Column j (1-based) holds column_sizes[j-1]
// parallel machines; every machine in column j feeds every machine in
// column j+1, so a path is one machine index per column. Rows above a
// column's size are structural placeholders and carry no data.
//
// Immutable value type, safe to share between threads. A default-constructed
// topology is empty and invalid; construct through validate_topology().
class NetworkTopology {
public:
    NetworkTopology() = default;

    int columns() const { return static_cast<int>(sizes_.size()); }
    int column_size(int col) const { return sizes_[static_cast<std::size_t>(col) - 1]; }
    int max_rows() const { return max_rows_; }

    bool node_exists(int row, int col) const {
        return col >= 1 && col <= columns() && row >= 1 && row <= column_size(col);
    }

    // Total number of machines (placeholders excluded).
    int node_count() const;

    const std::vector<int>& column_sizes() const { return sizes_; }

    bool operator==(const NetworkTopology&) const = default;

private:
    friend NetworkTopology validate_topology(const std::vector<int>&);

    std::vector<int> sizes_;
    int max_rows_ = 0;
};

// Throws EmptyTopology on an empty list and InvalidColumnSize on any
// non-positive entry.
NetworkTopology validate_topology(const std::vector<int>& column_sizes);

// A part's route: the 1-based machine index chosen in each column.
struct PathRecord {
    std::vector<int> machines;

    int operator[](int col) const { return machines[static_cast<std::size_t>(col) - 1]; }

    bool operator==(const PathRecord&) const = default;
};

// Throws PathTopologyMismatch if the path length or any index does not fit
// the topology.
void check_path(const PathRecord& path, const NetworkTopology& topology);

// Number of source-to-sink paths: the product of the column sizes.
// Throws OverflowError if the product exceeds the unsigned 64-bit range.
std::uint64_t path_count(const NetworkTopology& topology);

// Draws one machine index per column, independently and uniformly over the
// column. Consumes exactly one uniform per column. Under the complete
// inter-column connectivity this is the uniform distribution over all paths.
PathRecord sample_path(const NetworkTopology& topology, RandomStream& rng);

// Same draw sequence, written into an existing record (resized if needed);
// lets bulk generators keep path buffers out of their hot loops.
void sample_path_into(const NetworkTopology& topology, RandomStream& rng, PathRecord& out);

// Categorical per-column routing weights, an extension beyond the uniform
// routing the estimator consistency argument assumes (only cross-column
// independence is required). weights[j-1] needs column_size(j) nonnegative
// entries with a positive sum.
using ColumnWeights = std::vector<std::vector<double>>;

PathRecord sample_path(const NetworkTopology& topology, const ColumnWeights& weights,
                       RandomStream& rng);

// The r x c binary matrix with a 1 at each machine the path visits: entry
// (i-1, j-1) is 1 iff path[j] == i. Exactly one 1 per column.
Matrix<std::uint8_t> indicator_matrix(const PathRecord& path, const NetworkTopology& topology);

}  // namespace qnet
