#ifndef KFA_SPECTRAL_HPP
#define KFA_SPECTRAL_HPP

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "kfa/embedding.hpp"
#include "kfa/kernel.hpp"
#include "kfa/table.hpp"

namespace kfa {

/// Eigenpairs of the group-weighted pooled covariance operator, expressed in
/// the centered sample span: e_j = sum_i coeffs(j, i) (phi(x_i) - mu_pooled),
/// where mu_pooled = sum_i groupWeights_i phi(x_i).
struct SpectralBasis {
    Eigen::VectorXd eigenvalues;   // descending, >= 0
    Eigen::MatrixXd coeffs;        // J x n
    Eigen::VectorXd groupWeights;  // n, sums to 1
};

/// Equal group mass by default: w_i = 1/(2 n_{g(i)}), so the pooled law is
/// the even mixture of the two groups. With equalGroupMass = false the raw
/// empirical pool w_i = 1/n is used instead.
SpectralBasis pooled_spectrum(const SampleTable& table, const Gram& K, int topJ = 200,
                              bool equalGroupMass = true);

/// Centered Gram Kc_ij = <phi_i - mu, phi_j - mu> for the basis centering.
Eigen::MatrixXd centered_gram(const Gram& K, const Eigen::VectorXd& weights);

/// <e_j, e_l> through Gram algebra; used to verify RKHS orthonormality.
double basis_inner(const SpectralBasis& basis, int j, int l, const Gram& K);

/// Inner products <delta, e_j> for all retained j. delta must be a
/// difference-kind coefficient vector on the same sample as the basis.
Eigen::VectorXd delta_projections(const EmbeddingCoeffs& delta, const SpectralBasis& basis,
                                  const Gram& K);

/// Cumulative capture curve: c_m = sum_{j<=m} proj_j^2 / deltaNorm^2,
/// residual = 1 - c_m. Entry 0 is (m=0, c=0, residual=1).
struct AuditCurve {
    struct Entry {
        int m;
        double c_m;
        double residual;
    };
    std::vector<Entry> entries;
    double deltaNorm = 0.0;
};

AuditCurve audit_curve(const Eigen::VectorXd& projections, double deltaNorm);

/// Minimal m with c_m >= threshold, or nullopt if not reached within the
/// retained spectrum.
std::optional<int> k99(const AuditCurve& curve, double threshold = 0.99);

/// Finite-dimensional Hilbert ellipsoid {Lambda^r u : ||u|| <= R} with
/// Lambda = diag(eigenvalues); semi-axes R * lambda_j^r.
struct EllipsoidSpec {
    int dim = 0;
    Eigen::VectorXd eigenvalues;   // positive, non-increasing
    double r = 0.5;
    double R = 1.0;
    double alpha = 2.0;            // decay exponent of the default power law
    double c = 1.0;                // scale of the default power law

    /// lambda_j = c * j^{-alpha}, j = 1..dim.
    static EllipsoidSpec power_law(int dim, double alpha, double c, double r, double R);
};

/// Worst-case squared residual of the top-m axes subspace: R^2 lambda_{m+1}^{2r}.
/// Requires 0 <= m < dim.
double mwidth_exact(const EllipsoidSpec& spec, int m);

/// sup over the ellipsoid of ||P_{V_perp} delta||^2 for an explicit subspace
/// basis V (dim x q, orthonormal columns; q = 0 means the zero subspace),
/// computed exactly as R^2 times the top eigenvalue of Lambda^r P_{V_perp} Lambda^r.
double mwidth_sup_oracle(const EllipsoidSpec& spec, const Eigen::MatrixXd& V);

/// Lower bound on the squared residual after m approximately-satisfied
/// criteria: max(0, mmd^2 - sum_i eps_i^2).
double approx_pokemon_residual(double mmd, const std::vector<double>& epsilons);

/// OLS fit of log lambda_j = log c - alpha log j over j in [jLo, jHi]
/// (1-based, inclusive). Returns (alpha_hat, c_hat).
struct EigendecayFit {
    double alpha_hat = 0.0;
    double c_hat = 0.0;
};

EigendecayFit eigendecay_fit(const SpectralBasis& basis, int jLo, int jHi);

} // namespace kfa

#endif
