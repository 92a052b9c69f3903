#include "kfa/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

#include "kfa/embedding.hpp"
#include "kfa/parallel.hpp"
#include "kfa/random.hpp"

namespace kfa {

namespace {

double mmd2_of_labels(const std::vector<int>& label, const Gram& K) {
    std::vector<int> idxA, idxB;
    idxA.reserve(label.size());
    idxB.reserve(label.size());
    for (int i = 0; i < static_cast<int>(label.size()); ++i)
        (label[i] == 0 ? idxA : idxB).push_back(i);
    return mmd2_vstat(idxA, idxB, K);
}

/// Nearest-rank quantile on a sorted vector, ties broken downward.
double nearest_rank(const std::vector<double>& sorted, double q) {
    const double nq = q * static_cast<double>(sorted.size());
    long rank = static_cast<long>(std::ceil(nq));
    rank = std::max<long>(1, std::min<long>(rank, static_cast<long>(sorted.size())));
    return sorted[static_cast<std::size_t>(rank - 1)];
}

} // namespace

TestResult permutation_test_mmd(const SampleTable& table, const Gram& K, int B,
                                std::uint64_t seed) {
    if (B < 1) throw InputError("permutation_test_mmd: B must be >= 1");
    if (K.n != table.n()) throw InputError("permutation_test_mmd: Gram size mismatch");
    std::vector<int> label(table.g.size());
    long nA = 0;
    for (std::size_t i = 0; i < table.g.size(); ++i) {
        label[i] = table.g[i] == Group::A ? 0 : 1;
        nA += label[i] == 0;
    }
    if (nA == 0 || nA == static_cast<long>(label.size()))
        throw InputError("permutation_test_mmd: one group is empty");

    TestResult res;
    res.B = B;
    res.seed = seed;
    res.statistic = mmd2_of_labels(label, K);

    std::atomic<long> count{0};
    parallel_for_blocks(static_cast<std::size_t>(B), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t b = lo; b < hi; ++b) {
            Rng rng(split_seed(seed, b));
            std::vector<int> perm = label;
            rng.shuffle(perm);
            if (mmd2_of_labels(perm, K) >= res.statistic)
                count.fetch_add(1, std::memory_order_relaxed);
        }
    }, 8);
    res.pValue = (1.0 + static_cast<double>(count.load())) / (static_cast<double>(B) + 1.0);
    return res;
}

double hsic_vstat(const Gram& K, const Gram& L) {
    if (K.n != L.n) throw InputError("hsic_vstat: Gram sizes differ");
    const Eigen::Index n = K.n;
    const Eigen::VectorXd rowK = K.values.rowwise().mean();
    const double meanK = rowK.mean();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double kc = K.values(i, j) - rowK(i) - rowK(j) + meanK;
            acc += kc * L.values(i, j);
        }
    const double v = acc / (static_cast<double>(n) * static_cast<double>(n));
    return v < 0.0 ? 0.0 : v;
}

TestResult permutation_test_hsic(const Gram& K, const std::vector<int>& labels, int B,
                                 std::uint64_t seed) {
    if (B < 1) throw InputError("permutation_test_hsic: B must be >= 1");
    if (static_cast<Eigen::Index>(labels.size()) != K.n)
        throw InputError("permutation_test_hsic: label length mismatch");

    auto hsic_of = [&](const std::vector<int>& lab) {
        Gram L;
        L.n = K.n;
        L.spec = KernelSpec::linear();
        L.values.resize(K.n, K.n);
        for (Eigen::Index i = 0; i < K.n; ++i)
            for (Eigen::Index j = 0; j < K.n; ++j)
                L.values(i, j) = lab[static_cast<std::size_t>(i)] ==
                                         lab[static_cast<std::size_t>(j)]
                                     ? 1.0
                                     : 0.0;
        return hsic_vstat(K, L);
    };

    TestResult res;
    res.B = B;
    res.seed = seed;
    res.statistic = hsic_of(labels);

    std::atomic<long> count{0};
    parallel_for_blocks(static_cast<std::size_t>(B), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t b = lo; b < hi; ++b) {
            Rng rng(split_seed(seed, b));
            std::vector<int> perm = labels;
            rng.shuffle(perm);
            if (hsic_of(perm) >= res.statistic)
                count.fetch_add(1, std::memory_order_relaxed);
        }
    }, 8);
    res.pValue = (1.0 + static_cast<double>(count.load())) / (static_cast<double>(B) + 1.0);
    return res;
}

IntervalEstimate bootstrap_ci(const TableStatistic& statistic, const SampleTable& table, int B,
                              double level, std::uint64_t seed, BootstrapStrata strata) {
    if (B < 1) throw InputError("bootstrap_ci: B must be >= 1");
    if (!(level > 0.0 && level < 1.0)) throw InputError("bootstrap_ci: level must lie in (0,1)");
    const Eigen::Index n = table.n();
    if (n < 1) throw InputError("bootstrap_ci: empty table");

    std::vector<std::vector<int>> strata_idx;
    switch (strata) {
        case BootstrapStrata::WholeSample: {
            std::vector<int> all(static_cast<std::size_t>(n));
            std::iota(all.begin(), all.end(), 0);
            strata_idx.push_back(std::move(all));
            break;
        }
        case BootstrapStrata::WithinGroup:
            strata_idx.push_back(table.group_indices(Group::A));
            strata_idx.push_back(table.group_indices(Group::B));
            break;
        case BootstrapStrata::WithinCell:
            for (int y = 0; y < 2; ++y) {
                strata_idx.push_back(table.cell_indices(y, Group::A));
                strata_idx.push_back(table.cell_indices(y, Group::B));
            }
            break;
    }
    std::erase_if(strata_idx, [](const std::vector<int>& s) { return s.empty(); });
    if (strata_idx.empty()) throw InputError("bootstrap_ci: no non-empty strata");

    constexpr int kAttemptsPerReplicate = 10;
    std::vector<double> values(static_cast<std::size_t>(B));
    std::atomic<long> redraws{0};
    std::atomic<long> failures{0};
    std::atomic<bool> exhausted{false};

    parallel_for_blocks(static_cast<std::size_t>(B), [&](std::size_t lo, std::size_t hi) {
        std::vector<int> resample;
        for (std::size_t b = lo; b < hi; ++b) {
            bool done = false;
            for (int attempt = 0; attempt < kAttemptsPerReplicate && !done; ++attempt) {
                Rng rng(split_seed(seed, b, static_cast<std::uint64_t>(attempt)));
                resample.clear();
                for (const auto& s : strata_idx)
                    for (std::size_t k = 0; k < s.size(); ++k)
                        resample.push_back(s[rng.uniform_int(s.size())]);
                try {
                    values[b] = statistic(table.gather(resample));
                    done = true;
                } catch (const std::exception&) {
                    failures.fetch_add(1, std::memory_order_relaxed);
                    redraws.fetch_add(1, std::memory_order_relaxed);
                }
            }
            if (!done) exhausted.store(true);
        }
    }, 8);

    if (exhausted.load() ||
        failures.load() > static_cast<long>(0.05 * static_cast<double>(B)))
        throw DegenerateDataError(
            "bootstrap_ci: statistic undefined on more than 5% of resamples");

    IntervalEstimate est;
    est.B = B;
    est.level = level;
    est.redraws = redraws.load();
    est.point = statistic(table);
    std::sort(values.begin(), values.end());
    est.lo = nearest_rank(values, (1.0 - level) / 2.0);
    est.hi = nearest_rank(values, 1.0 - (1.0 - level) / 2.0);
    est.point_in_interval = est.lo <= est.point && est.point <= est.hi;
    return est;
}

std::vector<bool> bh_fdr(const std::vector<double>& pValues, double q) {
    if (!(q > 0.0 && q < 1.0)) throw InputError("bh_fdr: q must lie in (0,1)");
    const std::size_t n = pValues.size();
    std::vector<bool> reject(n, false);
    if (n == 0) return reject;
    for (double p : pValues)
        if (!(p > 0.0 && p <= 1.0)) throw InputError("bh_fdr: p-values must lie in (0,1]");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pValues[a] < pValues[b]; });
    double threshold = -1.0;
    for (std::size_t k = n; k >= 1; --k) {
        const double p = pValues[order[k - 1]];
        if (p <= q * static_cast<double>(k) / static_cast<double>(n)) {
            threshold = p;
            break;
        }
    }
    if (threshold >= 0.0)
        for (std::size_t i = 0; i < n; ++i) reject[i] = pValues[i] <= threshold;
    return reject;
}

} // namespace kfa
