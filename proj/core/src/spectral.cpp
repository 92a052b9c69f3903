#include "kfa/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

namespace kfa {

Eigen::MatrixXd centered_gram(const Gram& K, const Eigen::VectorXd& w) {
    const Eigen::VectorXd Kw = K.values * w;
    const double wKw = w.dot(Kw);
    Eigen::MatrixXd Kc = K.values;
    Kc.colwise() -= Kw;
    Kc.rowwise() -= Kw.transpose();
    Kc.array() += wKw;
    return Kc;
}

SpectralBasis pooled_spectrum(const SampleTable& table, const Gram& K, int topJ,
                              bool equalGroupMass) {
    if (topJ < 1) throw InputError("pooled_spectrum: topJ must be >= 1");
    if (K.n != table.n()) throw InputError("pooled_spectrum: Gram size does not match table");
    const long nA = table.group_count(Group::A);
    const long nB = table.group_count(Group::B);
    if (nA == 0 || nB == 0)
        throw InputError(std::string("pooled_spectrum: empty group ") + (nA == 0 ? "a" : "b"));

    const Eigen::Index n = table.n();
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (equalGroupMass)
            w(i) = table.g[static_cast<std::size_t>(i)] == Group::A ? 0.5 / nA : 0.5 / nB;
        else
            w(i) = 1.0 / static_cast<double>(n);
    }

    // Covariance eigenproblem in the weighted-centered span: symmetrize as
    // M = W^{1/2} Kc W^{1/2}; eigenpairs (lambda, gamma) give basis
    // coefficients beta = W^{1/2} gamma / sqrt(lambda).
    const Eigen::MatrixXd Kc = centered_gram(K, w);
    const Eigen::VectorXd sqw = w.array().sqrt();
    Eigen::MatrixXd M = sqw.asDiagonal() * Kc * sqw.asDiagonal();
    M = 0.5 * (M + M.transpose());   // keep the solver input exactly symmetric

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("pooled_spectrum: eigendecomposition failed");

    // Eigen returns ascending order; take from the top.
    const Eigen::VectorXd& vals = eig.eigenvalues();
    const Eigen::MatrixXd& vecs = eig.eigenvectors();
    const double lmax = std::max(0.0, vals(n - 1));
    const double floor = 1e-12 * lmax;

    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = n - 1; k >= 0 && static_cast<int>(keep.size()) < topJ; --k) {
        const double lam = vals(k);
        if (lam <= floor || lam <= 0.0) break;   // zero directions are dropped
        keep.push_back(k);
    }

    SpectralBasis basis;
    basis.groupWeights = w;
    basis.eigenvalues.resize(static_cast<Eigen::Index>(keep.size()));
    basis.coeffs.resize(static_cast<Eigen::Index>(keep.size()), n);
    for (std::size_t j = 0; j < keep.size(); ++j) {
        const double lam = std::max(0.0, vals(keep[j]));
        basis.eigenvalues(static_cast<Eigen::Index>(j)) = lam;
        basis.coeffs.row(static_cast<Eigen::Index>(j)) =
            (sqw.array() * vecs.col(keep[j]).array() / std::sqrt(lam)).transpose();
    }
    return basis;
}

double basis_inner(const SpectralBasis& basis, int j, int l, const Gram& K) {
    if (j < 0 || l < 0 || j >= basis.coeffs.rows() || l >= basis.coeffs.rows())
        throw InputError("basis_inner: index out of range");
    const Eigen::MatrixXd Kc = centered_gram(K, basis.groupWeights);
    return basis.coeffs.row(j) * Kc * basis.coeffs.row(l).transpose();
}

Eigen::VectorXd delta_projections(const EmbeddingCoeffs& delta, const SpectralBasis& basis,
                                  const Gram& K) {
    if (delta.weights.size() != basis.coeffs.cols() || K.n != basis.coeffs.cols())
        throw InputError("delta_projections: mismatched sample sets");
    if (delta.kind != EmbeddingCoeffs::Kind::Difference)
        throw InputError("delta_projections: delta must be a difference embedding");
    // For weights summing to 0 the element already lies in the centered span:
    // <delta, e_j> = d' Kc beta_j = d' K beta_j - (d' K w) sum(beta_j).
    const Eigen::VectorXd v = K.values * delta.weights;
    const double dKw = v.dot(basis.groupWeights);
    Eigen::VectorXd proj(basis.coeffs.rows());
    for (Eigen::Index j = 0; j < basis.coeffs.rows(); ++j)
        proj(j) = basis.coeffs.row(j).dot(v) - dKw * basis.coeffs.row(j).sum();
    return proj;
}

AuditCurve audit_curve(const Eigen::VectorXd& projections, double deltaNorm) {
    if (!(deltaNorm * deltaNorm > kDegenerateDelta2Tol))
        throw DegenerateDataError("audit undefined: groups indistinguishable in RKHS");
    AuditCurve curve;
    curve.deltaNorm = deltaNorm;
    curve.entries.reserve(static_cast<std::size_t>(projections.size()) + 1);
    curve.entries.push_back({0, 0.0, 1.0});
    double acc = 0.0;
    const double d2 = deltaNorm * deltaNorm;
    for (Eigen::Index j = 0; j < projections.size(); ++j) {
        acc += projections(j) * projections(j);
        const double c = std::min(1.0, acc / d2);
        curve.entries.push_back({static_cast<int>(j) + 1, c, 1.0 - c});
    }
    return curve;
}

std::optional<int> k99(const AuditCurve& curve, double threshold) {
    for (const auto& e : curve.entries)
        if (e.c_m >= threshold) return e.m;
    return std::nullopt;
}

EllipsoidSpec EllipsoidSpec::power_law(int dim, double alpha, double c, double r, double R) {
    if (dim < 1) throw InputError("EllipsoidSpec: dim must be >= 1");
    if (!(c > 0.0) || !(r > 0.0) || !(R > 0.0))
        throw InputError("EllipsoidSpec: c, r, R must be positive");
    EllipsoidSpec spec;
    spec.dim = dim;
    spec.alpha = alpha;
    spec.c = c;
    spec.r = r;
    spec.R = R;
    spec.eigenvalues.resize(dim);
    for (int j = 1; j <= dim; ++j)
        spec.eigenvalues(j - 1) = c * std::pow(static_cast<double>(j), -alpha);
    return spec;
}

namespace {
void validate_ellipsoid(const EllipsoidSpec& spec) {
    if (spec.dim < 1 || spec.eigenvalues.size() != spec.dim)
        throw InputError("EllipsoidSpec: eigenvalue count does not match dim");
    for (int j = 0; j < spec.dim; ++j) {
        if (!(spec.eigenvalues(j) > 0.0))
            throw InputError("EllipsoidSpec: eigenvalues must be positive");
        if (j > 0 && spec.eigenvalues(j) > spec.eigenvalues(j - 1))
            throw InputError("EllipsoidSpec: eigenvalues must be non-increasing");
    }
    if (!(spec.r > 0.0) || !(spec.R > 0.0))
        throw InputError("EllipsoidSpec: r and R must be positive");
}
} // namespace

double mwidth_exact(const EllipsoidSpec& spec, int m) {
    validate_ellipsoid(spec);
    if (m < 0) throw InputError("mwidth_exact: m must be >= 0");
    if (m >= spec.dim)
        throw InputError("mwidth_exact: m >= dim (finite-dimensional saturation)");
    return spec.R * spec.R * std::pow(spec.eigenvalues(m), 2.0 * spec.r);
}

double mwidth_sup_oracle(const EllipsoidSpec& spec, const Eigen::MatrixXd& V) {
    validate_ellipsoid(spec);
    if (V.size() > 0 && V.rows() != spec.dim)
        throw InputError("mwidth_sup_oracle: V row count does not match dim");
    const Eigen::Index q = V.cols();
    if (q > 0) {
        const Eigen::MatrixXd G = V.transpose() * V;
        if ((G - Eigen::MatrixXd::Identity(q, q)).cwiseAbs().maxCoeff() > 1e-10)
            throw InputError("mwidth_sup_oracle: V is not orthonormal");
    }
    const Eigen::VectorXd lr = spec.eigenvalues.array().pow(spec.r);
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(spec.dim, spec.dim);
    if (q > 0) P -= V * V.transpose();
    Eigen::MatrixXd M = lr.asDiagonal() * P * lr.asDiagonal();
    M = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
    return spec.R * spec.R * std::max(0.0, eig.eigenvalues().maxCoeff());
}

double approx_pokemon_residual(double mmd, const std::vector<double>& epsilons) {
    if (!(mmd >= 0.0) || !std::isfinite(mmd))
        throw InputError("approx_pokemon_residual: mmd must be >= 0");
    double s = 0.0;
    for (double e : epsilons) {
        if (!(e >= 0.0) || !std::isfinite(e))
            throw InputError("approx_pokemon_residual: epsilons must be >= 0");
        s += e * e;
    }
    return std::max(0.0, mmd * mmd - s);
}

EigendecayFit eigendecay_fit(const SpectralBasis& basis, int jLo, int jHi) {
    if (jLo < 1 || jHi < jLo) throw InputError("eigendecay_fit: bad j range");
    std::vector<double> lx, ly;
    for (int j = jLo; j <= jHi && j <= basis.eigenvalues.size(); ++j) {
        const double lam = basis.eigenvalues(j - 1);
        if (lam > 0.0) {
            lx.push_back(std::log(static_cast<double>(j)));
            ly.push_back(std::log(lam));
        }
    }
    if (lx.size() < 3)
        throw InputError("eigendecay_fit: fewer than 3 positive eigenvalues in range");
    const double n = static_cast<double>(lx.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw InputError("eigendecay_fit: degenerate design (single j)");
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    return {-slope, std::exp(intercept)};
}

} // namespace kfa
