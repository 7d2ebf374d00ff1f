#include "qnet/quality_model.hpp"

#include <cmath>
#include <string>

#include "qnet/errors.hpp"

namespace qnet {

namespace {

constexpr double kProbSumTol = 1e-12;

void validate_discrete(const DiscreteDist& d) {
    if (d.values.empty() || d.values.size() != d.probabilities.size()) {
        throw ModelSpecError("discrete distribution: values and probs must be nonempty and equal-length");
    }
    double sum = 0.0;
    for (double p : d.probabilities) {
        if (p < 0.0 || p > 1.0) throw ModelSpecError("discrete distribution: prob outside [0,1]");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > kProbSumTol) {
        throw ModelSpecError("discrete distribution: probs sum to " + std::to_string(sum));
    }
    for (double v : d.values) {
        if (!std::isfinite(v)) throw ModelSpecError("discrete distribution: non-finite value");
    }
}

}  // namespace

NodeDistribution::NodeDistribution(GaussianDist d) : value_(d) {
    if (!(d.variance >= 0.0) || !std::isfinite(d.variance) || !std::isfinite(d.mean)) {
        throw ModelSpecError("gaussian distribution: requires finite mean and variance >= 0");
    }
}

NodeDistribution::NodeDistribution(BernoulliDist d) : value_(d) {
    if (!(d.success_prob >= 0.0 && d.success_prob <= 1.0)) {
        throw ModelSpecError("bernoulli distribution: requires 0 <= p <= 1");
    }
}

NodeDistribution::NodeDistribution(ConstantDist d) : value_(d) {
    if (!std::isfinite(d.value)) throw ModelSpecError("constant distribution: non-finite value");
}

NodeDistribution::NodeDistribution(DiscreteDist d) : value_(std::move(d)) {
    validate_discrete(std::get<DiscreteDist>(value_));
}

NodeDistribution::NodeDistribution(CustomDist d) : value_(std::move(d)) {
    if (!std::get<CustomDist>(value_).sample) {
        throw ModelSpecError("custom distribution: sampler is empty");
    }
}

double NodeDistribution::mean() const {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GaussianDist>) {
                return d.mean;
            } else if constexpr (std::is_same_v<T, BernoulliDist>) {
                return d.success_prob;
            } else if constexpr (std::is_same_v<T, ConstantDist>) {
                return d.value;
            } else if constexpr (std::is_same_v<T, DiscreteDist>) {
                double m = 0.0;
                for (std::size_t k = 0; k < d.values.size(); ++k) m += d.values[k] * d.probabilities[k];
                return m;
            } else {
                return d.mean;
            }
        },
        value_);
}

double NodeDistribution::variance() const {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GaussianDist>) {
                return d.variance;
            } else if constexpr (std::is_same_v<T, BernoulliDist>) {
                return d.success_prob * (1.0 - d.success_prob);
            } else if constexpr (std::is_same_v<T, ConstantDist>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, DiscreteDist>) {
                double m = 0.0, m2 = 0.0;
                for (std::size_t k = 0; k < d.values.size(); ++k) {
                    m += d.values[k] * d.probabilities[k];
                    m2 += d.values[k] * d.values[k] * d.probabilities[k];
                }
                return m2 - m * m;
            } else {
                return d.variance;
            }
        },
        value_);
}

double NodeDistribution::sample(RandomStream& rng) const {
    return std::visit(
        [&rng](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GaussianDist>) {
                return d.mean + std::sqrt(d.variance) * rng.normal();
            } else if constexpr (std::is_same_v<T, BernoulliDist>) {
                return static_cast<double>(rng.bernoulli(d.success_prob));
            } else if constexpr (std::is_same_v<T, ConstantDist>) {
                return d.value;
            } else if constexpr (std::is_same_v<T, DiscreteDist>) {
                const double u = rng.uniform();
                double cum = 0.0;
                for (std::size_t k = 0; k + 1 < d.values.size(); ++k) {
                    cum += d.probabilities[k];
                    if (u < cum) return d.values[k];
                }
                return d.values.back();
            } else {
                return d.sample(rng);
            }
        },
        value_);
}

QualityModel::QualityModel(NetworkTopology topology, NodeDistribution default_dist)
    : topology_(std::move(topology)) {
    col_offset_.reserve(static_cast<std::size_t>(topology_.columns()) + 1);
    col_offset_.push_back(0);
    for (int j = 1; j <= topology_.columns(); ++j) {
        col_offset_.push_back(col_offset_.back() + topology_.column_size(j));
    }
    dists_.assign(static_cast<std::size_t>(col_offset_.back()), default_dist);
}

void QualityModel::set_node(int row, int col, NodeDistribution dist) {
    if (!topology_.node_exists(row, col)) {
        throw NodeAbsent("model: no machine (" + std::to_string(row) + "," + std::to_string(col) + ")");
    }
    dists_[static_cast<std::size_t>(col_offset_[static_cast<std::size_t>(col) - 1] + row - 1)] =
        std::move(dist);
}

const NodeDistribution& QualityModel::node(int row, int col) const {
    if (!topology_.node_exists(row, col)) {
        throw NodeAbsent("model: no machine (" + std::to_string(row) + "," + std::to_string(col) + ")");
    }
    return dists_[static_cast<std::size_t>(col_offset_[static_cast<std::size_t>(col) - 1] + row - 1)];
}

double draw_path_quality(const QualityModel& model, const PathRecord& path, RandomStream& rng) {
    check_path(path, model.topology());
    double quality = 0.0;
    for (int j = 1; j <= model.topology().columns(); ++j) {
        quality += model.node(path[j], j).sample(rng);
    }
    return quality;
}

std::vector<double> draw_path_contributions(const QualityModel& model, const PathRecord& path,
                                            RandomStream& rng) {
    check_path(path, model.topology());
    std::vector<double> contributions;
    contributions.reserve(static_cast<std::size_t>(model.topology().columns()));
    for (int j = 1; j <= model.topology().columns(); ++j) {
        contributions.push_back(model.node(path[j], j).sample(rng));
    }
    return contributions;
}

TheoreticalMoments theoretical_moments(const QualityModel& model) {
    const auto& topo = model.topology();
    TheoreticalMoments m{
        MomentMatrix(static_cast<std::size_t>(topo.max_rows()),
                     static_cast<std::size_t>(topo.columns())),
        MomentMatrix(static_cast<std::size_t>(topo.max_rows()),
                     static_cast<std::size_t>(topo.columns()))};
    for (int j = 1; j <= topo.columns(); ++j) {
        for (int i = 1; i <= topo.column_size(j); ++i) {
            const auto& dist = model.node(i, j);
            m.mean(static_cast<std::size_t>(i) - 1, static_cast<std::size_t>(j) - 1) = dist.mean();
            m.variance(static_cast<std::size_t>(i) - 1, static_cast<std::size_t>(j) - 1) =
                dist.variance();
        }
    }
    return m;
}

std::vector<Observation> generate_dataset(const QualityModel& model, std::size_t n,
                                          std::uint64_t seed) {
    if (n < 1) throw Error("generate_dataset: n must be >= 1");
    RandomStream rng(seed);
    std::vector<Observation> observations;
    observations.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        PathRecord path = sample_path(model.topology(), rng);
        const double quality = draw_path_quality(model, path, rng);
        observations.push_back(Observation{std::move(path), quality});
    }
    return observations;
}

}  // namespace qnet
