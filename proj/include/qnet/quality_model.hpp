#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "qnet/network.hpp"

namespace qnet {

struct GaussianDist {
    double mean = 0.0;
    double variance = 1.0;
};

struct BernoulliDist {
    double success_prob = 0.5;
};

struct ConstantDist {
    double value = 0.0;
};

struct DiscreteDist {
    std::vector<double> values;
    std::vector<double> probabilities;  // must sum to 1 within 1e-12
};

// Library-only escape hatch: a user-supplied sampler with declared moments.
// Not representable in the JSON model format.
struct CustomDist {
    std::function<double(RandomStream&)> sample;
    double mean = 0.0;
    double variance = 0.0;
};

// Per-machine quality contribution law. All supported kinds have finite
// fourth moments, which the variance inference relies on.
//
// Uniform consumption per sample: gaussian draws two uniforms, bernoulli and
// discrete one, constant none. Custom samplers consume whatever they consume.
class NodeDistribution {
public:
    NodeDistribution(GaussianDist d);
    NodeDistribution(BernoulliDist d);
    NodeDistribution(ConstantDist d);
    NodeDistribution(DiscreteDist d);
    NodeDistribution(CustomDist d);

    double mean() const;
    double variance() const;
    double sample(RandomStream& rng) const;

    using Value = std::variant<GaussianDist, BernoulliDist, ConstantDist, DiscreteDist, CustomDist>;
    const Value& value() const { return value_; }

private:
    Value value_;
};

// The grid of per-machine quality laws over a topology. A distribution is
// assigned to exactly the machines that exist; placeholder cells have none.
// Immutable in spirit: configure through set_node right after construction.
class QualityModel {
public:
    QualityModel(NetworkTopology topology, NodeDistribution default_dist);

    void set_node(int row, int col, NodeDistribution dist);  // NodeAbsent outside the grid

    const NodeDistribution& node(int row, int col) const;
    const NetworkTopology& topology() const { return topology_; }

private:
    NetworkTopology topology_;
    std::vector<NodeDistribution> dists_;  // packed by column
    std::vector<int> col_offset_;
};

// One produced part: its route and the quality measured at the end of it.
struct Observation {
    PathRecord path;
    double quality = 0.0;

    bool operator==(const Observation&) const = default;
};

// Additive path quality: the sum of one fresh draw from each visited
// machine's distribution, in column order.
double draw_path_quality(const QualityModel& model, const PathRecord& path, RandomStream& rng);

// Node-resolved variant for debugging and independence checks: returns the
// per-column contributions (index j-1) whose sum is the path quality.
std::vector<double> draw_path_contributions(const QualityModel& model, const PathRecord& path,
                                            RandomStream& rng);

// Entry is absent at placeholder cells.
using MomentMatrix = Matrix<std::optional<double>>;

struct TheoreticalMoments {
    MomentMatrix mean;
    MomentMatrix variance;
};

TheoreticalMoments theoretical_moments(const QualityModel& model);

// n i.i.d. observations from a single stream seeded with `seed`: per part,
// the path first (one uniform per column), then the contributions. Fully
// determined by (model, n, seed).
std::vector<Observation> generate_dataset(const QualityModel& model, std::size_t n,
                                          std::uint64_t seed);

}  // namespace qnet
