#ifndef KFA_SYNTHETIC_HPP
#define KFA_SYNTHETIC_HPP

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>

#include "kfa/spectral.hpp"
#include "kfa/table.hpp"

namespace kfa {

/// Gaussian population with one diagonal-covariance cell per (y, g).
struct CellDistribution {
    Eigen::VectorXd mean;
    Eigen::VectorXd var;   // diagonal covariance, entries > 0
};

struct PopulationSpec {
    CellDistribution cells[2][2];   // [y][group]
    double p_a = 0.5, p_b = 0.5;    // 0 < p_g < 1
    double group_mass_a = 0.5;      // Pr[G = a]
    long n = 0;
    std::uint64_t seed = 0;

    Eigen::Index dim() const { return cells[0][0].mean.size(); }
};

struct PopulationDraw {
    SampleTable table;
    std::array<long, 4> cell_counts{};   // {n_{0,a}, n_{1,a}, n_{0,b}, n_{1,b}}
    int redraws = 0;
};

/// i.i.d. draws, deterministic given the seed. Whole-table redraw (derived
/// seeds) until every (y, g) cell is hit; errors after the redraw cap.
PopulationDraw gen_population(const PopulationSpec& spec);

/// Population with Y | G from the base rates and yhat | Y from (tpr, fpr)
/// independent of the group, so separation holds exactly in distribution.
SampleTable gen_separated_classifier(double p_a, double p_b, double group_mass_a, double tpr,
                                     double fpr, long n, std::uint64_t seed);

enum class KmrScoreMode {
    Perfect,        // S = Y: satisfies unbiasedness and both balance conditions
    UnbiasedOnly,   // S = p_hat_g: group-constant, balance fails by |p_a - p_b|
    BalancedOnly,   // S = 0.1 + 0.6 Y: balance exact, unbiasedness off
};

Eigen::VectorXd gen_kmr_score(const SampleTable& table, KmrScoreMode mode);

/// Encoded table whose empirical parity gap and separation gap land on the
/// requested knobs (exactly at the cell-mean level; within sampling noise
/// after the isotropic jitter). Knobs (0, 0) produce a constant output: the
/// collapse theorem leaves no class signal to place, and a positive
/// signal_target is refused as infeasible.
struct CollapseEncoderOptions {
    std::optional<double> signal_target;   // ||mu_{1,b} - mu_{0,b}||; default derived from knobs
    double noise = -1.0;                   // < 0: auto scale
};

SampleTable gen_collapse_encoder(const SampleTable& table, double epsilon_knob, double rho_knob,
                                 int dimZ, std::uint64_t seed,
                                 const CollapseEncoderOptions& opts = {});

/// Linear-kernel population realizing the bridge hypotheses: class-
/// conditional group differences delta_y sit entirely in coordinates > m
/// with ||delta_y|| = R lambda_{m+1}^r, and S = <w, x> (clipped) is
/// unbiased by construction, with a per-group post-clip recalibration.
struct BridgeInstance {
    SampleTable table;         // features + y + g + score
    double W = 0.0;            // ||w||
    double rhoM_true = 0.0;    // R lambda_{m+1}^r
    double absDeltaP = 0.0;    // population |p_a - p_b|
    double dev = 0.0;          // deviation scale 1 - (mu+ - mu-)
    double clip_fraction = 0.0;
    double recal_residual[2] = {0.0, 0.0};   // post-recalibration |mean_g(S) - p_hat_g|
    int retries = 0;
};

BridgeInstance gen_bridge_instance(int m, const EllipsoidSpec& spectrum, double p_a, double p_b,
                                   long n, std::uint64_t seed);

/// Independent triple-loop V-statistic of squared MMD, evaluating the kernel
/// pairwise without a Gram matrix. This is the oracle side of the estimator
/// agreement checks.
double mmd_oracle(const std::vector<int>& idxA, const std::vector<int>& idxB,
                  const KernelSpec& spec, const Eigen::MatrixXd& X);

} // namespace kfa

#endif
