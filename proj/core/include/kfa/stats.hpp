#ifndef KFA_STATS_HPP
#define KFA_STATS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "kfa/kernel.hpp"
#include "kfa/table.hpp"

namespace kfa {

/// One-sided permutation test result; pValue = (1 + #{perm >= obs}) / (B + 1),
/// never exactly 0.
struct TestResult {
    double statistic = 0.0;
    double pValue = 1.0;
    int B = 0;
    std::uint64_t seed = 0;
};

/// Squared-MMD permutation test of P_a = P_b by relabelling the group column.
/// Replicates run in parallel with derived per-replicate seeds.
TestResult permutation_test_mmd(const SampleTable& table, const Gram& K, int B = 999,
                                std::uint64_t seed = 0);

/// Biased HSIC V-statistic trace(K H L H) / n^2 with H the centering
/// projection; small negative roundoff is clamped to 0.
double hsic_vstat(const Gram& K, const Gram& L);

/// HSIC permutation test of independence between the variable behind K and
/// binary labels (compared through the indicator kernel L_ij = 1[l_i = l_j]).
TestResult permutation_test_hsic(const Gram& K, const std::vector<int>& labels, int B = 999,
                                 std::uint64_t seed = 0);

/// Percentile bootstrap interval (nearest-rank quantiles, ties downward).
struct IntervalEstimate {
    double point = 0.0;
    double lo = 0.0, hi = 0.0;
    double level = 0.95;
    int B = 0;
    long redraws = 0;           // degenerate resamples that were redrawn
    bool point_in_interval = true;
};

enum class BootstrapStrata {
    WholeSample,   // resample all rows with replacement
    WithinGroup,   // resample within each group, preserving group sizes
    WithinCell,    // resample within each (y, g) cell
};

using TableStatistic = std::function<double(const SampleTable&)>;

/// Statistic failures (exceptions) trigger a redraw of that replicate with a
/// derived seed, up to 10 attempts per replicate; more than 5% failed
/// resamples is an error.
IntervalEstimate bootstrap_ci(const TableStatistic& statistic, const SampleTable& table,
                              int B = 1000, double level = 0.95, std::uint64_t seed = 0,
                              BootstrapStrata strata = BootstrapStrata::WholeSample);

/// Benjamini-Hochberg step-up at level q; returns the rejection mask in the
/// input order.
std::vector<bool> bh_fdr(const std::vector<double>& pValues, double q = 0.05);

} // namespace kfa

#endif
