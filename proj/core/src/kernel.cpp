#include "kfa/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "kfa/parallel.hpp"
#include "kfa/random.hpp"

namespace kfa {

KernelFamily parse_kernel_family(const std::string& name) {
    if (name == "gaussian-rbf" || name == "rbf" || name == "gaussian") return KernelFamily::GaussianRbf;
    if (name == "laplace") return KernelFamily::Laplace;
    if (name == "linear") return KernelFamily::Linear;
    throw InputError("unknown kernel family: " + name);
}

std::string kernel_family_name(KernelFamily family) {
    switch (family) {
        case KernelFamily::GaussianRbf: return "gaussian-rbf";
        case KernelFamily::Laplace: return "laplace";
        case KernelFamily::Linear: return "linear";
    }
    return "?";
}

namespace {

void validate_bandwidth(const KernelSpec& spec) {
    if (spec.family != KernelFamily::Linear &&
        !(spec.bandwidth > 0.0 && std::isfinite(spec.bandwidth)))
        throw InputError("kernel bandwidth must be positive and finite");
}

void validate_finite(const Eigen::MatrixXd& X, const char* what) {
    if (!X.allFinite()) throw InputError(std::string(what) + " contains non-finite entries");
}

double eval_unchecked(const KernelSpec& spec, const Eigen::RowVectorXd& x,
                      const Eigen::RowVectorXd& z) {
    switch (spec.family) {
        case KernelFamily::GaussianRbf:
            return std::exp(-(x - z).squaredNorm() / (2.0 * spec.bandwidth * spec.bandwidth));
        case KernelFamily::Laplace:
            return std::exp(-(x - z).lpNorm<1>() / spec.bandwidth);
        case KernelFamily::Linear:
            return x.dot(z);
    }
    return 0.0;
}

} // namespace

KernelSpec KernelSpec::rbf(double sigma) { return {KernelFamily::GaussianRbf, sigma}; }
KernelSpec KernelSpec::laplace(double sigma) { return {KernelFamily::Laplace, sigma}; }
KernelSpec KernelSpec::linear() { return {KernelFamily::Linear, 1.0}; }

double eval_kernel(const KernelSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& x2) {
    validate_bandwidth(spec);
    if (x.size() != x2.size())
        throw InputError("eval_kernel: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                         std::to_string(x2.size()) + ")");
    if (!x.allFinite() || !x2.allFinite())
        throw InputError("eval_kernel: non-finite input");
    return eval_unchecked(spec, x.transpose(), x2.transpose());
}

Gram gram(const KernelSpec& spec, const Eigen::MatrixXd& X) {
    validate_bandwidth(spec);
    const Eigen::Index n = X.rows();
    if (n < 1) throw InputError("gram: empty input");
    validate_finite(X, "gram: X");

    Gram out;
    out.spec = spec;
    out.n = n;
    out.values.resize(n, n);
    const double diag = spec.family == KernelFamily::Linear ? 0.0 : 1.0;

    parallel_for_blocks(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            out.values(ii, ii) = spec.family == KernelFamily::Linear
                                     ? X.row(ii).squaredNorm()
                                     : diag;
            for (Eigen::Index j = ii + 1; j < n; ++j)
                out.values(ii, j) = eval_unchecked(spec, X.row(ii), X.row(j));
        }
    });
    // Mirror the upper triangle so symmetry is exact as stored.
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) out.values(j, i) = out.values(i, j);
    return out;
}

Eigen::MatrixXd cross_gram(const KernelSpec& spec, const Eigen::MatrixXd& X,
                           const Eigen::MatrixXd& Z) {
    validate_bandwidth(spec);
    if (X.rows() < 1 || Z.rows() < 1) throw InputError("cross_gram: empty input");
    if (X.cols() != Z.cols()) throw InputError("cross_gram: dimension mismatch");
    validate_finite(X, "cross_gram: X");
    validate_finite(Z, "cross_gram: Z");

    Eigen::MatrixXd K(X.rows(), Z.rows());
    parallel_for_blocks(static_cast<std::size_t>(X.rows()), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            for (Eigen::Index j = 0; j < Z.rows(); ++j)
                K(static_cast<Eigen::Index>(i), j) =
                    eval_unchecked(spec, X.row(static_cast<Eigen::Index>(i)), Z.row(j));
    });
    return K;
}

double median_heuristic(const Eigen::MatrixXd& X, Eigen::Index cap, std::uint64_t seed) {
    if (X.rows() < 2) throw InputError("median_heuristic: need at least 2 points");
    if (cap < 2) throw InputError("median_heuristic: cap must be >= 2");
    validate_finite(X, "median_heuristic: X");

    // Seeded uniform subsample without replacement when n exceeds the cap.
    const Eigen::Index n = X.rows();
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
    if (n > cap) {
        Rng rng(seed);
        for (Eigen::Index i = 0; i < cap; ++i) {
            const auto j = i + static_cast<Eigen::Index>(
                                   rng.uniform_int(static_cast<std::size_t>(n - i)));
            std::swap(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)]);
        }
        rows.resize(static_cast<std::size_t>(cap));
    }

    const std::size_t m = rows.size();
    std::vector<double> d2;
    d2.reserve(m * (m - 1) / 2);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            d2.push_back((X.row(rows[i]) - X.row(rows[j])).squaredNorm());

    const std::size_t half = d2.size() / 2;
    std::nth_element(d2.begin(), d2.begin() + half, d2.end());
    double med = d2[half];
    if (d2.size() % 2 == 0) {
        // Even count: average the two central order statistics.
        const double below = *std::max_element(d2.begin(), d2.begin() + half);
        med = 0.5 * (below + med);
    }
    if (med <= 0.0)
        throw DegenerateDataError("degenerate sample: zero median distance");
    return std::sqrt(med);
}

} // namespace kfa
