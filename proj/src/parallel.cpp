#include "qnet/parallel.hpp"

#include "qnet/errors.hpp"

namespace qnet {

namespace {

// Contiguous block [begin, end) of `total` items for shard k of `shards`,
// remainder spread over the leading shards.
std::pair<std::size_t, std::size_t> shard_range(std::size_t total, int shards, int k) {
    const auto s = static_cast<std::size_t>(shards);
    const auto base = total / s;
    const auto extra = total % s;
    const auto uk = static_cast<std::size_t>(k);
    const std::size_t begin = uk * base + std::min(uk, extra);
    const std::size_t len = base + (uk < extra ? 1 : 0);
    return {begin, begin + len};
}

}  // namespace

std::vector<Observation> generate_dataset_parallel(const QualityModel& model, std::size_t n,
                                                   std::uint64_t seed, int shards) {
    if (n < 1) throw Error("generate_dataset_parallel: n must be >= 1");
    if (shards < 1) throw Error("generate_dataset_parallel: shards must be >= 1");

    // All path buffers are allocated up front on one thread; small-object
    // allocation from inside the parallel region serializes on the heap.
    std::vector<Observation> observations(n);
    const auto c = static_cast<std::size_t>(model.topology().columns());
    for (Observation& obs : observations) obs.path.machines.resize(c);

#pragma omp parallel for schedule(static, 1)
    for (int k = 0; k < shards; ++k) {
        const auto [begin, end] = shard_range(n, shards, k);
        RandomStream rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
        for (std::size_t idx = begin; idx < end; ++idx) {
            sample_path_into(model.topology(), rng, observations[idx].path);
            observations[idx].quality = draw_path_quality(model, observations[idx].path, rng);
        }
    }
    return observations;
}

EstimatorState accumulate_parallel(const NetworkTopology& topology,
                                   std::span<const Observation> obs, int shards) {
    if (shards < 1) throw Error("accumulate_parallel: shards must be >= 1");

    std::vector<EstimatorState> partial(static_cast<std::size_t>(shards));
#pragma omp parallel for schedule(static, 1)
    for (int k = 0; k < shards; ++k) {
        const auto [begin, end] = shard_range(obs.size(), shards, k);
        partial[static_cast<std::size_t>(k)] = accumulate(topology, obs.subspan(begin, end - begin));
    }

    // Merge in shard order so the result is independent of scheduling.
    EstimatorState merged = std::move(partial[0]);
    for (std::size_t k = 1; k < partial.size(); ++k) merged.merge(partial[k]);
    return merged;
}

}  // namespace qnet
