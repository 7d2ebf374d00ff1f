#pragma once

#include <optional>
#include <vector>

#include "qnet/estimators.hpp"

namespace qnet {

enum class TestKind { mean_diff, var_diff, bartlett };

struct NodeRef {
    int row = 0;
    int col = 0;

    bool operator==(const NodeRef&) const = default;
};

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    TestKind kind = TestKind::mean_diff;
    std::optional<int> df;  // Bartlett only
    NodeRef a;
    NodeRef b;              // unused for Bartlett (column-wide)
    // The p-value came from the zero-variance convention (p = 0 for a
    // nonzero difference with no spread, p = 1 when everything is equal);
    // the statistic is not meaningful in that case.
    bool degenerate = false;
    // Some group had fewer points than min_count_warn; the normal
    // approximation may be poor.
    bool low_count = false;
};

// Asymptotic z-test for the difference of two machines' mean contributions
// within a column. equal_variance pools the two conditional variances; the
// unequal-variance form uses Sigma/count per group. Two-sided normal
// p-value. Requires count >= 2 per machine (InsufficientData otherwise).
TestResult mean_diff_test(const Estimates& est, int col, int row, int row2,
                          bool equal_variance = true, int min_count_warn = 30);

// Asymptotic z-test for the difference of two machines' variance
// contributions, standardized by the fourth-moment variances Tau2/count.
TestResult variance_diff_test(const Estimates& est, int col, int row, int row2,
                              int min_count_warn = 30);

// Classical Bartlett homogeneity test over all machines of a column, using
// unbiased group variances count/(count-1) * Sigma. Chi-square p-value with
// r_j - 1 degrees of freedom. Requires count >= 2 per machine; refuses
// zero-variance groups (DegenerateVariance). A single-machine column has
// nothing to compare: statistic 0, p 1, df 0.
TestResult bartlett_test(const Estimates& est, int col);

// Benjamini-Yekutieli step-up adjustment, valid under arbitrary dependence:
// sorted ascending, adjusted_(k) = min(1, c(m) * m/k * p_(k)) with
// c(m) = sum_{i<=m} 1/i, then made monotone from the largest rank down.
// Returned in the original order. Throws InvalidPValue outside [0,1].
std::vector<double> by_adjust(const std::vector<double>& p_values);

enum class ComparisonKind { mean, variance };
enum class AdjustMethod { benjamini_yekutieli, none };

struct Comparison {
    NodeRef node;
    NodeRef reference;
    double difference = 0.0;   // estimate (mean or variance difference)
    double statistic = 0.0;
    double p_raw = 1.0;
    double p_adjusted = 1.0;
    bool degenerate = false;
    bool low_count = false;
};

struct ColumnComparisonReport {
    int column = 0;
    ComparisonKind kind = ComparisonKind::mean;
    int reference_row = 0;  // 0 in all-pairs mode
    bool all_pairs = false;
    double alpha = 0.05;
    std::vector<Comparison> comparisons;
    std::vector<NodeRef> flagged;  // adjusted p below alpha

    bool is_flagged(int row) const;
};

struct ColumnReportOptions {
    double alpha = 0.05;
    ComparisonKind kind = ComparisonKind::mean;
    AdjustMethod adjust = AdjustMethod::benjamini_yekutieli;
    // 0 selects the column's last machine as reference; otherwise the
    // explicit 1-based row. Ignored in all-pairs mode.
    int reference_row = 0;
    // Compare every unordered pair instead of node-vs-reference, with the
    // adjustment applied over all r(r-1)/2 p-values.
    bool all_pairs = false;
    bool equal_variance = true;  // pooled sigma for mean tests
    int min_count_warn = 30;
};

// Builds the column's comparison vector (each machine against the
// reference, by default the last machine), adjusts the p-values jointly and
// flags machines whose adjusted p falls below alpha. A single-machine
// column yields an empty report. Errors from the pairwise tests propagate.
ColumnComparisonReport column_report(const Estimates& est, int col,
                                     const ColumnReportOptions& options);

inline ColumnComparisonReport column_report(const Estimates& est, int col, double alpha,
                                            ComparisonKind kind) {
    ColumnReportOptions options;
    options.alpha = alpha;
    options.kind = kind;
    return column_report(est, col, options);
}

}  // namespace qnet
