#ifndef KFA_EMBEDDING_HPP
#define KFA_EMBEDDING_HPP

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "kfa/kernel.hpp"
#include "kfa/table.hpp"

namespace kfa {

/// RKHS element represented by coefficients over the observed sample:
/// f = sum_i weights_i phi(x_i). Mean embeddings carry nonnegative weights
/// summing to 1; differences carry weights summing to 0.
struct EmbeddingCoeffs {
    enum class Kind { Mean, Difference };
    Eigen::VectorXd weights;
    Kind kind = Kind::Mean;
};

EmbeddingCoeffs operator-(const EmbeddingCoeffs& a, const EmbeddingCoeffs& b);

/// Uniform average of the feature maps over `subset` (indices into the table).
EmbeddingCoeffs mean_embedding(const SampleTable& table, const std::vector<int>& subset);

/// All group and class-conditional embeddings of one table, plus the base
/// rates. delta = mu_a - mu_b and delta_y = mu_{y,a} - mu_{y,b}.
struct ConditionalEmbeddings {
    EmbeddingCoeffs mu_a, mu_b;
    EmbeddingCoeffs mu_ya[2][2];   // [y][group]
    EmbeddingCoeffs delta;
    EmbeddingCoeffs delta_y[2];
    double p_a = 0.0, p_b = 0.0, delta_p = 0.0;
    bool degenerate_base_rate = false;   // p_g in {0,1}; downstream theorem checks refuse
};

/// Throws InputError naming the first empty (y, g) cell.
ConditionalEmbeddings conditional_embeddings(const SampleTable& table);

/// <alpha, beta>_H = alpha' K beta.
double rkhs_inner(const EmbeddingCoeffs& alpha, const EmbeddingCoeffs& beta, const Gram& K);

/// sqrt of the clamped quadratic form; negative roundoff is clamped to 0 and
/// counted (see clamp_count).
double rkhs_norm(const EmbeddingCoeffs& alpha, const Gram& K);

/// Number of negative-quadratic-form clamps since reset (process-wide).
std::uint64_t clamp_count();
void reset_clamp_count();

/// Biased V-statistic of squared MMD between the two index sets:
/// (1/nA^2) sum K_AA - (2/nA nB) sum K_AB + (1/nB^2) sum K_BB.
double mmd2_vstat(const std::vector<int>& idxA, const std::vector<int>& idxB, const Gram& K);

/// Witness values f*(z_j) = sum_i (alphaP - alphaQ)_i crossK(i, j) / ||mu_P - mu_Q||.
/// crossK is the n x m kernel matrix from the sample to the query points.
/// Throws DegenerateDataError when the embeddings coincide.
Eigen::VectorXd witness_eval(const EmbeddingCoeffs& alphaP, const EmbeddingCoeffs& alphaQ,
                             const Gram& K, const Eigen::MatrixXd& crossK);

/// Squared-norm threshold below which a group difference is treated as zero
/// (absorbs roundoff when the two groups are the same point set).
inline constexpr double kDegenerateDelta2Tol = 1e-13;

} // namespace kfa

#endif
