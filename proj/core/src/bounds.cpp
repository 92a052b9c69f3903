#include "kfa/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kfa/embedding.hpp"

namespace kfa {

namespace {

double mean_over(const Eigen::VectorXd& v, const std::vector<int>& idx) {
    double s = 0.0;
    for (int i : idx) s += v(i);
    return s / static_cast<double>(idx.size());
}

} // namespace

RatesSummary rates_summary(const SampleTable& table) {
    if (!table.has_yhat()) throw InputError("rates_summary: table has no predictions");
    require_cells_nonempty(table);
    const auto& yhat = *table.yhat;

    RatesSummary r;
    long n1 = 0, pos_a = 0, pos_b = 0;
    long tp = 0, fp = 0, n0 = 0;
    long tp_g[2] = {0, 0}, fp_g[2] = {0, 0}, n1_g[2] = {0, 0}, n0_g[2] = {0, 0};
    long err = 0;
    const long n = static_cast<long>(table.y.size());
    for (long i = 0; i < n; ++i) {
        const int gi = static_cast<int>(table.g[static_cast<std::size_t>(i)]);
        const int yi = table.y[static_cast<std::size_t>(i)];
        const int pi = yhat[static_cast<std::size_t>(i)];
        if (yi == 1) {
            ++n1;
            ++n1_g[gi];
            if (pi == 1) {
                ++tp;
                ++tp_g[gi];
            }
        } else {
            ++n0;
            ++n0_g[gi];
            if (pi == 1) {
                ++fp;
                ++fp_g[gi];
            }
        }
        if (pi == 1) (gi == 0 ? pos_a : pos_b) += 1;
        if (pi != yi) ++err;
    }
    r.p = static_cast<double>(n1) / static_cast<double>(n);
    r.p_a = table.base_rate(Group::A);
    r.p_b = table.base_rate(Group::B);
    r.delta_p = r.p_a - r.p_b;
    r.tpr = static_cast<double>(tp) / static_cast<double>(n1);
    r.fpr = static_cast<double>(fp) / static_cast<double>(n0);
    r.tpr_a = static_cast<double>(tp_g[0]) / static_cast<double>(n1_g[0]);
    r.tpr_b = static_cast<double>(tp_g[1]) / static_cast<double>(n1_g[1]);
    r.fpr_a = static_cast<double>(fp_g[0]) / static_cast<double>(n0_g[0]);
    r.fpr_b = static_cast<double>(fp_g[1]) / static_cast<double>(n0_g[1]);
    const long nA = table.group_count(Group::A);
    const long nB = table.group_count(Group::B);
    r.dp_gap = std::abs(static_cast<double>(pos_a) / nA - static_cast<double>(pos_b) / nB);
    r.eo_gap = std::max(std::abs(r.tpr_a - r.tpr_b), std::abs(r.fpr_a - r.fpr_b));
    r.error = static_cast<double>(err) / static_cast<double>(n);
    return r;
}

BoundsReport fair_feature_report(const SampleTable& encoded, const KernelSpec& spec, double tol) {
    const ConditionalEmbeddings ce = conditional_embeddings(encoded);
    const Gram K = gram(spec, encoded.features);

    BoundsReport rep;
    rep.epsilon = rkhs_norm(ce.delta, K);
    rep.normDelta1 = rkhs_norm(ce.delta_y[1], K);
    rep.normDelta0 = rkhs_norm(ce.delta_y[0], K);
    rep.rho = std::max(rep.normDelta1, rep.normDelta0);
    rep.absDeltaP = std::abs(ce.delta_p);

    const EmbeddingCoeffs signal_a = ce.mu_ya[1][0] - ce.mu_ya[0][0];
    const EmbeddingCoeffs signal_b = ce.mu_ya[1][1] - ce.mu_ya[0][1];
    rep.signal_a = rkhs_norm(signal_a, K);
    rep.signal_b = rkhs_norm(signal_b, K);

    // Master identity: delta = p_a delta_1 + (1 - p_a) delta_0
    //                        + delta_p (mu_{1,b} - mu_{0,b}).
    // This is exact algebra on empirical embeddings; the residual measures
    // only roundoff.
    EmbeddingCoeffs residual;
    residual.kind = EmbeddingCoeffs::Kind::Difference;
    residual.weights = ce.delta.weights - ce.p_a * ce.delta_y[1].weights -
                       (1.0 - ce.p_a) * ce.delta_y[0].weights -
                       ce.delta_p * (ce.mu_ya[1][1].weights - ce.mu_ya[0][1].weights);
    rep.identity_residual = rkhs_norm(residual, K);

    if (rep.absDeltaP > 0.0) {
        rep.bound = (rep.epsilon + rep.rho) / rep.absDeltaP;
        rep.bound_finite = true;
        rep.margin_a = rep.bound - rep.signal_a;
        rep.margin_b = rep.bound - rep.signal_b;
        rep.violation_a = rep.margin_a < -tol;
        rep.violation_b = rep.margin_b < -tol;
    } else {
        rep.bound = std::numeric_limits<double>::infinity();
        rep.bound_finite = false;
        rep.margin_a = rep.margin_b = std::numeric_limits<double>::infinity();
    }
    return rep;
}

std::string verdict_name(KmrCheck::Verdict v) {
    switch (v) {
        case KmrCheck::Verdict::HypothesesViolated: return "hypotheses-violated";
        case KmrCheck::Verdict::EqualBaseRates: return "equal-base-rates";
        case KmrCheck::Verdict::ForcesSEqualsY: return "forces-S-equals-Y";
        case KmrCheck::Verdict::Inconsistent: return "inconsistent";
    }
    return "?";
}

KmrCheck kmr_audit(const SampleTable& table, double tol) {
    if (!table.has_score()) throw InputError("kmr_audit: table has no scores");
    const Eigen::VectorXd& s = *table.score;
    if (s.size() != table.n()) throw InputError("kmr_audit: score length mismatch");
    if ((s.array() < -1e-12).any() || (s.array() > 1.0 + 1e-12).any())
        throw InputError("kmr_audit: scores must lie in [0,1]");
    require_cells_nonempty(table);
    const double p_a = table.base_rate(Group::A);
    const double p_b = table.base_rate(Group::B);
    if (p_a <= 0.0 || p_a >= 1.0 || p_b <= 0.0 || p_b >= 1.0)
        throw DegenerateDataError("kmr_audit: degenerate base rate (p_g in {0,1})");

    KmrCheck chk;
    const Group groups[2] = {Group::A, Group::B};
    const double pg[2] = {p_a, p_b};
    for (int gi = 0; gi < 2; ++gi) {
        chk.mu_plus_g[gi] = mean_over(s, table.cell_indices(1, groups[gi]));
        chk.mu_minus_g[gi] = mean_over(s, table.cell_indices(0, groups[gi]));
        const double group_mean = mean_over(s, table.group_indices(groups[gi]));
        chk.unbiasedness_residual[gi] = std::abs(group_mean - pg[gi]);
    }
    chk.balance_gap_plus = std::abs(chk.mu_plus_g[0] - chk.mu_plus_g[1]);
    chk.balance_gap_minus = std::abs(chk.mu_minus_g[0] - chk.mu_minus_g[1]);

    std::vector<int> pos, neg;
    for (int i = 0; i < static_cast<int>(table.y.size()); ++i)
        (table.y[static_cast<std::size_t>(i)] == 1 ? pos : neg).push_back(i);
    chk.mu_plus = mean_over(s, pos);
    chk.mu_minus = mean_over(s, neg);
    chk.dichotomy_residual = (p_a - p_b) * (1.0 - (chk.mu_plus - chk.mu_minus));

    const bool hypotheses_hold = chk.unbiasedness_residual[0] <= tol &&
                                 chk.unbiasedness_residual[1] <= tol &&
                                 chk.balance_gap_plus <= tol && chk.balance_gap_minus <= tol;
    if (!hypotheses_hold)
        chk.verdict = KmrCheck::Verdict::HypothesesViolated;
    else if (std::abs(p_a - p_b) <= tol)
        chk.verdict = KmrCheck::Verdict::EqualBaseRates;
    else if (std::abs(chk.dichotomy_residual) <= tol)
        chk.verdict = KmrCheck::Verdict::ForcesSEqualsY;
    else
        chk.verdict = KmrCheck::Verdict::Inconsistent;
    return chk;
}

double pareto_bound(double p, double absDeltaP, double dpGap) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("pareto_bound: p must lie in (0,1)");
    if (!(absDeltaP > 0.0))
        throw InputError("bound undefined: equal base rates");
    if (!(dpGap >= 0.0)) throw InputError("pareto_bound: dpGap must be >= 0");
    return std::max(0.0, std::min(p, 1.0 - p) * (1.0 - dpGap / absDeltaP));
}

double dp_gap_identity(double absDeltaP, double tpr, double fpr) {
    if (tpr < 0.0 || tpr > 1.0 || fpr < 0.0 || fpr > 1.0)
        throw InputError("dp_gap_identity: rates must lie in [0,1]");
    return absDeltaP * std::abs(tpr - fpr);
}

double classifier_error(double p, double tpr, double fpr) {
    return p * (1.0 - tpr) + (1.0 - p) * fpr;
}

ParetoScan pareto_frontier_scan(double p, double absDeltaP, int resolution) {
    if (resolution < 2) throw InputError("pareto_frontier_scan: resolution must be >= 2");
    ParetoScan scan;
    scan.worst_margin = std::numeric_limits<double>::infinity();
    const double step = 1.0 / (resolution - 1);
    for (int i = 0; i < resolution; ++i) {
        const double tpr = i * step;
        for (int j = 0; j < resolution; ++j) {
            const double fpr = j * step;
            const double bound = pareto_bound(p, absDeltaP, dp_gap_identity(absDeltaP, tpr, fpr));
            const double err = classifier_error(p, tpr, fpr);
            const double margin = err - bound;
            ++scan.checked;
            if (margin < -1e-12) ++scan.violations;
            scan.worst_margin = std::min(scan.worst_margin, margin);
            if (std::abs(margin) <= 1e-12) ++scan.equality_points;
        }
    }
    // Tightness corners of the positively correlated case: FPR = 0 (p <= 1/2)
    // or TPR = 1 (p >= 1/2), at every kappa on the grid.
    scan.corners_verified = true;
    for (int i = 0; i < resolution; ++i) {
        const double kappa = i * step;
        const double tpr = p <= 0.5 ? kappa : 1.0;
        const double fpr = p <= 0.5 ? 0.0 : 1.0 - kappa;
        const double bound = pareto_bound(p, absDeltaP, dp_gap_identity(absDeltaP, tpr, fpr));
        const double err = classifier_error(p, tpr, fpr);
        if (std::abs(err - bound) > 1e-12) scan.corners_verified = false;
    }
    return scan;
}

RhoM rho_m(double p_a, double p_b, double normDelta1, double normDelta0) {
    if (!(p_a > 0.0 && p_a < 1.0 && p_b > 0.0 && p_b < 1.0))
        throw InputError("rho_m: base rates must lie in (0,1)");
    if (normDelta1 < 0.0 || normDelta0 < 0.0)
        throw InputError("rho_m: norms must be >= 0");
    RhoM r;
    r.rho_a = p_b * normDelta1 + (1.0 - p_b) * normDelta0;   // opposite group of a is b
    r.rho_b = p_a * normDelta1 + (1.0 - p_a) * normDelta0;
    r.value = std::max(r.rho_a, r.rho_b);
    return r;
}

double bridge_kappa(double W, double rho_g, double absDeltaP) {
    if (!(W > 0.0) || !(absDeltaP > 0.0))
        throw InputError("bridge_kappa: W and absDeltaP must be positive");
    return W * rho_g / absDeltaP;
}

double bridge_tail_bound(double W, double rhoM, double absDeltaP, double t) {
    if (!(W > 0.0)) throw InputError("bridge_tail_bound: W must be positive");
    if (!(absDeltaP > 0.0)) throw InputError("bridge_tail_bound: absDeltaP must be positive");
    if (!(t > 0.0 && t <= 1.0)) throw InputError("bridge_tail_bound: t must lie in (0,1]");
    if (rhoM < 0.0) throw InputError("bridge_tail_bound: rhoM must be >= 0");
    return std::min(1.0, W * rhoM / (absDeltaP * t));
}

double bridge_rate_bound(double R, double lambdaM1, double r) {
    if (!(R > 0.0) || !(lambdaM1 > 0.0) || !(r >= 0.0))
        throw InputError("bridge_rate_bound: inputs must be positive");
    return R * std::pow(lambdaM1, r);
}

} // namespace kfa
