#pragma once

// Naive two-pass reference for the streamed estimators: materializes the
// multiset of path qualities through every machine and applies the textbook
// mean / central-moment formulas. Deliberately independent of the streaming
// implementation it checks.

#include <cmath>
#include <span>
#include <vector>

#include "qnet/estimators.hpp"

namespace qnet_test {

inline qnet::Estimates reference_estimates(const qnet::NetworkTopology& topology,
                                           std::span<const qnet::Observation> observations) {
    const auto rows = static_cast<std::size_t>(topology.max_rows());
    const auto cols = static_cast<std::size_t>(topology.columns());

    std::vector<std::vector<std::vector<double>>> samples(
        rows, std::vector<std::vector<double>>(cols));
    for (const qnet::Observation& obs : observations) {
        for (int j = 1; j <= topology.columns(); ++j) {
            samples[static_cast<std::size_t>(obs.path[j]) - 1][static_cast<std::size_t>(j) - 1]
                .push_back(obs.quality);
        }
    }

    qnet::Estimates est{topology,
                        qnet::Matrix<double>(rows, cols),
                        qnet::Matrix<double>(rows, cols),
                        qnet::Matrix<double>(rows, cols),
                        qnet::Matrix<std::uint64_t>(rows, cols),
                        observations.size()};
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const auto& xs = samples[i][j];
            if (xs.empty()) continue;
            const double count = static_cast<double>(xs.size());
            double sum = 0.0;
            for (double x : xs) sum += x;
            const double mean = sum / count;
            double m2 = 0.0, m4 = 0.0;
            for (double x : xs) {
                const double d = x - mean;
                m2 += d * d;
                m4 += d * d * d * d;
            }
            est.t(i, j) = mean;
            est.sigma(i, j) = m2 / count;
            est.tau2(i, j) = m4 / count - (m2 / count) * (m2 / count);
            est.counts(i, j) = xs.size();
        }
    }
    return est;
}

inline double rel_diff(double a, double b) {
    const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) / scale;
}

// Largest relative deviation between two estimate sets over T, Sigma, Tau2.
inline double max_estimate_diff(const qnet::Estimates& a, const qnet::Estimates& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.t.rows(); ++i) {
        for (std::size_t j = 0; j < a.t.cols(); ++j) {
            worst = std::max(worst, rel_diff(a.t(i, j), b.t(i, j)));
            worst = std::max(worst, rel_diff(a.sigma(i, j), b.sigma(i, j)));
            worst = std::max(worst, rel_diff(a.tau2(i, j), b.tau2(i, j)));
        }
    }
    return worst;
}

}  // namespace qnet_test
