#ifndef KFA_BOUNDS_HPP
#define KFA_BOUNDS_HPP

#include <string>
#include <vector>

#include "kfa/kernel.hpp"
#include "kfa/table.hpp"

namespace kfa {

/// Classification rates of a predicted table. TPR/FPR are the pooled rates,
/// which coincide with the per-group ones under exact separation.
struct RatesSummary {
    double p = 0.0;                 // overall base rate
    double p_a = 0.0, p_b = 0.0;
    double delta_p = 0.0;           // p_a - p_b
    double tpr = 0.0, fpr = 0.0;    // pooled
    double tpr_a = 0.0, tpr_b = 0.0;
    double fpr_a = 0.0, fpr_b = 0.0;
    double dp_gap = 0.0;
    double eo_gap = 0.0;            // max(|TPR_a-TPR_b|, |FPR_a-FPR_b|)
    double error = 0.0;             // empirical misclassification rate
};

/// Requires yhat and all four (y, g) cells non-empty.
RatesSummary rates_summary(const SampleTable& table);

/// Group-difference geometry of an encoded table, with the joint-fairness
/// bound (epsilon + rho) / |delta p| and the master-identity residual.
struct BoundsReport {
    double epsilon = 0.0;           // ||mu_a - mu_b||
    double rho = 0.0;               // max_y ||delta_y||
    double normDelta1 = 0.0, normDelta0 = 0.0;
    double absDeltaP = 0.0;
    double bound = 0.0;             // (epsilon + rho) / absDeltaP; inf when absDeltaP == 0
    double signal_a = 0.0, signal_b = 0.0;   // ||mu_{1,g} - mu_{0,g}||
    double identity_residual = 0.0; // must vanish: the identity is algebraic
    bool bound_finite = true;
    bool violation_a = false, violation_b = false;
    double margin_a = 0.0, margin_b = 0.0;   // bound - signal (negative on violation)
};

/// Builds the Gram on the encoded features and evaluates the report.
/// Violations are flagged beyond `tol`; they indicate a broken invariant,
/// not a property of the data.
BoundsReport fair_feature_report(const SampleTable& encoded, const KernelSpec& spec,
                                 double tol = 1e-8);

/// Outcome of the unbiasedness + class-balance audit of a score.
struct KmrCheck {
    enum class Verdict { HypothesesViolated, EqualBaseRates, ForcesSEqualsY, Inconsistent };
    double mu_plus = 0.0, mu_minus = 0.0;             // pooled class-conditional means
    double mu_plus_g[2] = {0.0, 0.0};                 // per group a, b
    double mu_minus_g[2] = {0.0, 0.0};
    double unbiasedness_residual[2] = {0.0, 0.0};     // |E[S|G=g] - p_g|
    double balance_gap_plus = 0.0, balance_gap_minus = 0.0;
    double dichotomy_residual = 0.0;                  // (p_a - p_b)(1 - (mu+ - mu-))
    Verdict verdict = Verdict::HypothesesViolated;
};

std::string verdict_name(KmrCheck::Verdict v);

/// Requires scores in [0,1] and 0 < p_g < 1 for both groups; throws
/// DegenerateDataError otherwise. `tol` gates the hypothesis checks.
KmrCheck kmr_audit(const SampleTable& table, double tol = 1e-8);

/// Error floor for a separation-satisfying classifier at demographic-parity
/// gap dpGap: max(0, min(p, 1-p) (1 - dpGap / absDeltaP)).
double pareto_bound(double p, double absDeltaP, double dpGap);

/// Under exact separation, DP_gap = |delta p| |tpr - fpr|.
double dp_gap_identity(double absDeltaP, double tpr, double fpr);

/// p (1 - tpr) + (1 - p) fpr.
double classifier_error(double p, double tpr, double fpr);

/// Exhaustive grid verification that classifier_error >= pareto_bound on a
/// resolution x resolution (tpr, fpr) grid, certifying the equality corners.
struct ParetoScan {
    long checked = 0;
    long violations = 0;
    double worst_margin = 0.0;        // min over grid of error - bound
    long equality_points = 0;         // |error - bound| <= 1e-12
    bool corners_verified = false;    // expected tightness corners achieve equality
};

ParetoScan pareto_frontier_scan(double p, double absDeltaP, int resolution);

/// rho_m = max over groups of the opposite-group convex combination of the
/// class-conditional difference norms.
struct RhoM {
    double rho_a = 0.0;   // p_b ||delta_1|| + (1 - p_b) ||delta_0||
    double rho_b = 0.0;   // p_a ||delta_1|| + (1 - p_a) ||delta_0||
    double value = 0.0;   // max of the two
};

RhoM rho_m(double p_a, double p_b, double normDelta1, double normDelta0);

/// Per-group deviation scale kappa_g = W rho_g / absDeltaP.
double bridge_kappa(double W, double rho_g, double absDeltaP);

/// Tail bound min(1, W rhoM / (absDeltaP t)) for t in (0, 1].
double bridge_tail_bound(double W, double rhoM, double absDeltaP, double t);

/// Ceiling R lambda_{m+1}^r on rho_m under the class-conditional source
/// condition.
double bridge_rate_bound(double R, double lambdaM1, double r);

} // namespace kfa

#endif
