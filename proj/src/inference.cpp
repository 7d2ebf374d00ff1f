#include "qnet/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qnet/errors.hpp"
#include "qnet/special_functions.hpp"

namespace qnet {

namespace {

struct Group {
    std::uint64_t count = 0;
    double t = 0.0;
    double sigma = 0.0;
    double tau2 = 0.0;
};

Group load_group(const Estimates& est, int col, int row) {
    if (!est.exists(row, col)) {
        throw NodeAbsent("no machine (" + std::to_string(row) + "," + std::to_string(col) + ")");
    }
    const auto r = static_cast<std::size_t>(row) - 1;
    const auto c = static_cast<std::size_t>(col) - 1;
    const std::uint64_t count = est.counts(r, c);
    if (count == 0) {
        throw NodeUnvisited("machine (" + std::to_string(row) + "," + std::to_string(col) +
                            ") has no observations");
    }
    if (count < 2) {
        throw InsufficientData("machine (" + std::to_string(row) + "," + std::to_string(col) +
                               ") has " + std::to_string(count) + " observation(s), need >= 2");
    }
    return Group{count, est.t(r, c), est.sigma(r, c), est.tau2(r, c)};
}

// Zero-spread shortcut shared by both difference tests: no sampling noise,
// so equality gives p = 1 and any difference gives p = 0.
TestResult degenerate_result(TestKind kind, int col, int row, int row2, double diff,
                             bool low_count) {
    TestResult r;
    r.kind = kind;
    r.a = NodeRef{row, col};
    r.b = NodeRef{row2, col};
    r.statistic = 0.0;
    r.p_value = diff == 0.0 ? 1.0 : 0.0;
    r.degenerate = true;
    r.low_count = low_count;
    return r;
}

}  // namespace

TestResult mean_diff_test(const Estimates& est, int col, int row, int row2, bool equal_variance,
                          int min_count_warn) {
    const Group a = load_group(est, col, row);
    const Group b = load_group(est, col, row2);
    const double na = static_cast<double>(a.count);
    const double nb = static_cast<double>(b.count);
    const bool low_count = a.count < static_cast<std::uint64_t>(min_count_warn) ||
                           b.count < static_cast<std::uint64_t>(min_count_warn);
    const double diff = a.t - b.t;

    double statistic;
    if (equal_variance) {
        const double pooled = (na * a.sigma + nb * b.sigma) / (na + nb);
        if (pooled == 0.0) {
            return degenerate_result(TestKind::mean_diff, col, row, row2, diff, low_count);
        }
        statistic = std::sqrt(na * nb / (na + nb)) * diff / std::sqrt(pooled);
    } else {
        const double se2 = a.sigma / na + b.sigma / nb;
        if (se2 == 0.0) {
            return degenerate_result(TestKind::mean_diff, col, row, row2, diff, low_count);
        }
        statistic = diff / std::sqrt(se2);
    }

    TestResult r;
    r.kind = TestKind::mean_diff;
    r.a = NodeRef{row, col};
    r.b = NodeRef{row2, col};
    r.statistic = statistic;
    r.p_value = two_sided_normal_p(statistic);
    r.low_count = low_count;
    return r;
}

TestResult variance_diff_test(const Estimates& est, int col, int row, int row2,
                              int min_count_warn) {
    const Group a = load_group(est, col, row);
    const Group b = load_group(est, col, row2);
    const double na = static_cast<double>(a.count);
    const double nb = static_cast<double>(b.count);
    const bool low_count = a.count < static_cast<std::uint64_t>(min_count_warn) ||
                           b.count < static_cast<std::uint64_t>(min_count_warn);
    const double diff = a.sigma - b.sigma;

    const double se2 = a.tau2 / na + b.tau2 / nb;
    if (se2 == 0.0) {
        return degenerate_result(TestKind::var_diff, col, row, row2, diff, low_count);
    }

    TestResult r;
    r.kind = TestKind::var_diff;
    r.a = NodeRef{row, col};
    r.b = NodeRef{row2, col};
    r.statistic = diff / std::sqrt(se2);
    r.p_value = two_sided_normal_p(r.statistic);
    r.low_count = low_count;
    return r;
}

TestResult bartlett_test(const Estimates& est, int col) {
    if (col < 1 || col > est.topology.columns()) {
        throw NodeAbsent("no column " + std::to_string(col));
    }
    const int k = est.topology.column_size(col);

    TestResult r;
    r.kind = TestKind::bartlett;
    r.a = NodeRef{0, col};
    r.df = k - 1;
    if (k == 1) {
        // One machine: nothing to compare.
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }

    double n_total = 0.0;
    double pooled = 0.0;
    double sum_log = 0.0;
    double sum_inv = 0.0;
    bool low_count = false;
    for (int i = 1; i <= k; ++i) {
        const Group g = load_group(est, col, i);
        const double ni = static_cast<double>(g.count);
        // Unbiased group variance from the stored population Sigma.
        const double s2 = ni * g.sigma / (ni - 1.0);
        if (s2 == 0.0) {
            throw DegenerateVariance("machine (" + std::to_string(i) + "," + std::to_string(col) +
                                     ") has zero variance; Bartlett statistic undefined");
        }
        n_total += ni;
        pooled += (ni - 1.0) * s2;
        sum_log += (ni - 1.0) * std::log(s2);
        sum_inv += 1.0 / (ni - 1.0);
        low_count = low_count || g.count < 30;
    }
    const double dof = n_total - static_cast<double>(k);
    pooled /= dof;

    const double num = dof * std::log(pooled) - sum_log;
    const double correction = 1.0 + (sum_inv - 1.0 / dof) / (3.0 * (k - 1.0));
    r.statistic = std::max(0.0, num / correction);  // clamp fp negatives at the equal-variance point
    r.p_value = chi_square_sf(r.statistic, k - 1);
    r.low_count = low_count;
    return r;
}

std::vector<double> by_adjust(const std::vector<double>& p_values) {
    const std::size_t m = p_values.size();
    if (m == 0) return {};
    for (double p : p_values) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw InvalidPValue("p-value " + std::to_string(p) + " outside [0,1]");
        }
    }

    double c_m = 0.0;
    for (std::size_t i = 1; i <= m; ++i) c_m += 1.0 / static_cast<double>(i);

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

    std::vector<double> adjusted_sorted(m);
    for (std::size_t rank0 = 0; rank0 < m; ++rank0) {
        const double rank = static_cast<double>(rank0 + 1);
        const double value = c_m * static_cast<double>(m) / rank * p_values[order[rank0]];
        adjusted_sorted[rank0] = std::min(1.0, value);
    }
    for (std::size_t rank0 = m - 1; rank0-- > 0;) {
        adjusted_sorted[rank0] = std::min(adjusted_sorted[rank0], adjusted_sorted[rank0 + 1]);
    }

    std::vector<double> adjusted(m);
    for (std::size_t rank0 = 0; rank0 < m; ++rank0) adjusted[order[rank0]] = adjusted_sorted[rank0];
    return adjusted;
}

bool ColumnComparisonReport::is_flagged(int row) const {
    return std::any_of(flagged.begin(), flagged.end(),
                       [&](const NodeRef& n) { return n.row == row; });
}

ColumnComparisonReport column_report(const Estimates& est, int col,
                                     const ColumnReportOptions& options) {
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
        throw InvalidAlpha("alpha must lie in (0,1)");
    }
    if (col < 1 || col > est.topology.columns()) {
        throw NodeAbsent("no column " + std::to_string(col));
    }
    const int r_col = est.topology.column_size(col);

    ColumnComparisonReport report;
    report.column = col;
    report.kind = options.kind;
    report.alpha = options.alpha;
    report.all_pairs = options.all_pairs;

    if (r_col == 1) {
        report.reference_row = 1;
        return report;
    }

    std::vector<std::pair<int, int>> pairs;
    if (options.all_pairs) {
        report.reference_row = 0;
        for (int i = 1; i <= r_col; ++i) {
            for (int i2 = i + 1; i2 <= r_col; ++i2) pairs.emplace_back(i, i2);
        }
    } else {
        int reference = options.reference_row == 0 ? r_col : options.reference_row;
        if (!est.exists(reference, col)) {
            throw NodeAbsent("reference machine (" + std::to_string(reference) + "," +
                             std::to_string(col) + ") does not exist");
        }
        report.reference_row = reference;
        for (int i = 1; i <= r_col; ++i) {
            if (i != reference) pairs.emplace_back(i, reference);
        }
    }

    std::vector<double> raw;
    raw.reserve(pairs.size());
    for (const auto& [i, i2] : pairs) {
        const TestResult t =
            options.kind == ComparisonKind::mean
                ? mean_diff_test(est, col, i, i2, options.equal_variance, options.min_count_warn)
                : variance_diff_test(est, col, i, i2, options.min_count_warn);
        Comparison cmp;
        cmp.node = NodeRef{i, col};
        cmp.reference = NodeRef{i2, col};
        cmp.difference = options.kind == ComparisonKind::mean ? mean_difference(est, col, i, i2)
                                                              : variance_difference(est, col, i, i2);
        cmp.statistic = t.statistic;
        cmp.p_raw = t.p_value;
        cmp.degenerate = t.degenerate;
        cmp.low_count = t.low_count;
        report.comparisons.push_back(cmp);
        raw.push_back(t.p_value);
    }

    const std::vector<double> adjusted =
        options.adjust == AdjustMethod::benjamini_yekutieli ? by_adjust(raw) : raw;
    for (std::size_t k = 0; k < report.comparisons.size(); ++k) {
        report.comparisons[k].p_adjusted = adjusted[k];
        if (adjusted[k] < options.alpha) {
            const Comparison& cmp = report.comparisons[k];
            report.flagged.push_back(cmp.node);
            if (options.all_pairs && !report.is_flagged(cmp.reference.row)) {
                report.flagged.push_back(cmp.reference);
            }
        }
    }
    // Deduplicate all-pairs flags, keep row order.
    std::sort(report.flagged.begin(), report.flagged.end(),
              [](const NodeRef& a, const NodeRef& b) { return a.row < b.row; });
    report.flagged.erase(std::unique(report.flagged.begin(), report.flagged.end()),
                         report.flagged.end());
    return report;
}

}  // namespace qnet
