#pragma once

#include <span>

#include "qnet/estimators.hpp"

namespace qnet {

// OpenMP-parallel counterparts of generate_dataset() and accumulate().
// Results are deterministic functions of their arguments: the shard layout
// is fixed by `shards`, never by the runtime thread count. Compiled without
// OpenMP the same shard loops run serially and produce identical output.

// Shard k of `shards` draws from RandomStream(derive_seed(seed, k)) and the
// shards are concatenated in shard order. With shards == 1 this is exactly
// generate_dataset(model, n, seed); with more shards it is a different (but
// equally distributed and fully reproducible) dataset.
std::vector<Observation> generate_dataset_parallel(const QualityModel& model, std::size_t n,
                                                   std::uint64_t seed, int shards);

// Splits the observations into `shards` contiguous blocks, accumulates each
// independently and merges in shard order. Agrees with the serial
// accumulate() up to floating-point merge rounding.
EstimatorState accumulate_parallel(const NetworkTopology& topology,
                                   std::span<const Observation> obs, int shards);

}  // namespace qnet
