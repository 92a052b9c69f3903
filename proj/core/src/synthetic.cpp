#include "kfa/synthetic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "kfa/random.hpp"

namespace kfa {

namespace {

void validate_rate(double p, const char* name) {
    if (!(p > 0.0 && p < 1.0))
        throw InputError(std::string(name) + " must lie in (0,1)");
}

void validate_unit(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
        throw InputError(std::string(name) + " must lie in [0,1]");
}

} // namespace

PopulationDraw gen_population(const PopulationSpec& spec) {
    validate_rate(spec.p_a, "p_a");
    validate_rate(spec.p_b, "p_b");
    validate_rate(spec.group_mass_a, "group_mass_a");
    if (spec.n < 4) throw InputError("gen_population: n must be >= 4 (one row per cell)");
    const Eigen::Index d = spec.dim();
    for (int y = 0; y < 2; ++y)
        for (int g = 0; g < 2; ++g) {
            const auto& cell = spec.cells[y][g];
            if (cell.mean.size() != d || cell.var.size() != d)
                throw InputError("gen_population: inconsistent cell dimensions");
            if ((cell.var.array() <= 0.0).any())
                throw InputError("gen_population: cell variances must be positive");
        }

    constexpr int kRedrawCap = 64;
    for (int attempt = 0; attempt < kRedrawCap; ++attempt) {
        Rng rng(split_seed(spec.seed, static_cast<std::uint64_t>(attempt)));
        PopulationDraw draw;
        draw.redraws = attempt;
        draw.table.features.resize(spec.n, d);
        draw.table.y.resize(static_cast<std::size_t>(spec.n));
        draw.table.g.resize(static_cast<std::size_t>(spec.n));
        draw.cell_counts = {0, 0, 0, 0};
        for (long i = 0; i < spec.n; ++i) {
            const int gi = rng.bernoulli(spec.group_mass_a) ? 0 : 1;
            const double pg = gi == 0 ? spec.p_a : spec.p_b;
            const int yi = rng.bernoulli(pg) ? 1 : 0;
            const auto& cell = spec.cells[yi][gi];
            for (Eigen::Index k = 0; k < d; ++k)
                draw.table.features(i, k) = cell.mean(k) + std::sqrt(cell.var(k)) * rng.normal();
            draw.table.y[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(yi);
            draw.table.g[static_cast<std::size_t>(i)] = gi == 0 ? Group::A : Group::B;
            draw.cell_counts[static_cast<std::size_t>(gi) * 2 + yi] += 1;
        }
        if (std::all_of(draw.cell_counts.begin(), draw.cell_counts.end(),
                        [](long c) { return c > 0; }))
            return draw;
    }
    throw DegenerateDataError(
        "gen_population: impossible cell (a (y,g) cell stayed empty after the redraw cap)");
}

SampleTable gen_separated_classifier(double p_a, double p_b, double group_mass_a, double tpr,
                                     double fpr, long n, std::uint64_t seed) {
    validate_rate(p_a, "p_a");
    validate_rate(p_b, "p_b");
    validate_rate(group_mass_a, "group_mass_a");
    validate_unit(tpr, "tpr");
    validate_unit(fpr, "fpr");
    if (n < 1) throw InputError("gen_separated_classifier: n must be >= 1");

    Rng rng(seed);
    SampleTable t;
    t.features.resize(n, 1);
    t.y.resize(static_cast<std::size_t>(n));
    t.g.resize(static_cast<std::size_t>(n));
    t.yhat.emplace(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const bool in_a = rng.bernoulli(group_mass_a);
        const double pg = in_a ? p_a : p_b;
        const int yi = rng.bernoulli(pg) ? 1 : 0;
        // yhat depends on Y only, never on G: exact separation in distribution.
        const int pi = rng.bernoulli(yi == 1 ? tpr : fpr) ? 1 : 0;
        t.features(i, 0) = rng.normal();
        t.y[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(yi);
        t.g[static_cast<std::size_t>(i)] = in_a ? Group::A : Group::B;
        (*t.yhat)[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(pi);
    }
    return t;
}

Eigen::VectorXd gen_kmr_score(const SampleTable& table, KmrScoreMode mode) {
    const Eigen::Index n = table.n();
    Eigen::VectorXd s(n);
    switch (mode) {
        case KmrScoreMode::Perfect:
            for (Eigen::Index i = 0; i < n; ++i) s(i) = table.y[static_cast<std::size_t>(i)];
            break;
        case KmrScoreMode::UnbiasedOnly: {
            const double pa = table.base_rate(Group::A);
            const double pb = table.base_rate(Group::B);
            for (Eigen::Index i = 0; i < n; ++i)
                s(i) = table.g[static_cast<std::size_t>(i)] == Group::A ? pa : pb;
            break;
        }
        case KmrScoreMode::BalancedOnly:
            // Class-only score: balance holds exactly; unbiasedness residual
            // is |0.1 - 0.4 p_g|, nonzero unless p_g = 0.25.
            for (Eigen::Index i = 0; i < n; ++i)
                s(i) = 0.1 + 0.6 * table.y[static_cast<std::size_t>(i)];
            break;
    }
    return s;
}

SampleTable gen_collapse_encoder(const SampleTable& table, double epsilon_knob, double rho_knob,
                                 int dimZ, std::uint64_t seed,
                                 const CollapseEncoderOptions& opts) {
    if (dimZ < 1) throw InputError("gen_collapse_encoder: dimZ must be >= 1");
    if (epsilon_knob < 0.0 || rho_knob < 0.0)
        throw InputError("gen_collapse_encoder: knobs must be >= 0");
    require_cells_nonempty(table);

    const Eigen::Index n = table.n();
    const double p_a = table.base_rate(Group::A);
    const double p_b = table.base_rate(Group::B);
    const double dp = p_a - p_b;
    const double abs_dp = std::abs(dp);

    SampleTable out;
    out.y = table.y;
    out.g = table.g;
    out.features = Eigen::MatrixXd::Zero(n, dimZ);

    const double requested_signal = opts.signal_target.value_or(-1.0);
    const bool zero_knobs = epsilon_knob == 0.0 && rho_knob == 0.0;
    if (zero_knobs) {
        if (requested_signal > 0.0)
            throw InputError(
                "gen_collapse_encoder: infeasible: exact parity and separation force zero "
                "class signal when base rates differ");
        return out;   // constant encoder: exact parity + separation, zero signal
    }

    // Class signal carried by group b; ceiling (eps + rho) / |delta p|.
    double D;
    if (requested_signal >= 0.0) {
        D = requested_signal;
        if (abs_dp > 0.0 && D > (epsilon_knob + rho_knob) / abs_dp + 1e-12)
            throw InputError(
                "gen_collapse_encoder: infeasible: requested class signal exceeds "
                "(epsilon + rho) / |delta p|");
    } else {
        D = abs_dp > 0.0 ? epsilon_knob / abs_dp : 0.0;
    }

    // Decompose the parity target into the base-rate-coupled signal term and
    // an explicit group-difference component c along the signal axis (q1) or
    // an orthogonal axis (q2), with anti-symmetric q3 offsets filling rho.
    double c_q1 = 0.0;   // shared delta_y magnitude along q1 (cancels the coupled term)
    double c_q2 = 0.0;   // shared delta_y component along q2 (pure parity)
    const double coupled = abs_dp * D;
    if (coupled > epsilon_knob) {
        c_q1 = coupled - epsilon_knob;
        if (c_q1 > rho_knob + 1e-12)
            throw InputError(
                "gen_collapse_encoder: infeasible knobs: parity target requires more "
                "cancellation than the separation knob allows");
        c_q1 = std::min(c_q1, rho_knob);
    } else {
        const double rest =
            std::sqrt(std::max(0.0, epsilon_knob * epsilon_knob - coupled * coupled));
        if (rest > rho_knob + 1e-12)
            throw InputError(
                "gen_collapse_encoder: infeasible knobs: epsilon exceeds what the separation "
                "knob and base-rate coupling can produce");
        c_q2 = std::min(rest, rho_knob);
    }
    const double shared2 = c_q1 * c_q1 + c_q2 * c_q2;
    const double eta_max = std::sqrt(std::max(0.0, rho_knob * rho_knob - shared2));
    // Anti-symmetric q3 offsets: p_a eta_1 + (1 - p_a) eta_0 = 0 with
    // max(|eta_1|, |eta_0|) = eta_max, so rho lands exactly on the knob.
    double e1, e0;
    if (p_a <= 0.5) {
        e1 = eta_max;
        e0 = -eta_max * p_a / (1.0 - p_a);
    } else {
        e0 = eta_max;
        e1 = -eta_max * (1.0 - p_a) / p_a;
    }

    // Orthonormal directions from a seeded Gaussian QR; columns reused
    // cyclically when dimZ < 3.
    Rng rng(seed);
    const int nq = std::min(3, dimZ);
    Eigen::MatrixXd Gm(dimZ, nq);
    for (int i = 0; i < dimZ; ++i)
        for (int j = 0; j < nq; ++j) Gm(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Gm);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(dimZ, nq);
    const Eigen::VectorXd q1 = Q.col(0 % nq);
    const Eigen::VectorXd q2 = Q.col(1 % nq);
    const Eigen::VectorXd q3 = Q.col(2 % nq);

    // Cell means: group b carries y*D*q1; group a adds delta_y.
    Eigen::VectorXd mean_yb[2] = {Eigen::VectorXd::Zero(dimZ), D * q1};
    const double sign_cancel = dp >= 0.0 ? -1.0 : 1.0;   // cancel the coupled term
    Eigen::VectorXd delta_y[2] = {sign_cancel * c_q1 * q1 + c_q2 * q2 + e0 * q3,
                                  sign_cancel * c_q1 * q1 + c_q2 * q2 + e1 * q3};

    double noise = opts.noise;
    if (noise < 0.0)
        noise = 0.02 * std::max({epsilon_knob, rho_knob, D, 0.1});

    for (Eigen::Index i = 0; i < n; ++i) {
        const int yi = table.y[static_cast<std::size_t>(i)];
        Eigen::VectorXd z = mean_yb[yi];
        if (table.g[static_cast<std::size_t>(i)] == Group::A) z += delta_y[yi];
        for (int k = 0; k < dimZ; ++k) z(k) += noise * rng.normal();
        out.features.row(i) = z.transpose();
    }
    return out;
}

BridgeInstance gen_bridge_instance(int m, const EllipsoidSpec& spectrum, double p_a, double p_b,
                                   long n, std::uint64_t seed) {
    validate_rate(p_a, "p_a");
    validate_rate(p_b, "p_b");
    if (p_a == p_b) throw InputError("gen_bridge_instance: base rates must differ");
    if (m < 0) throw InputError("gen_bridge_instance: m must be >= 0");
    const int d = spectrum.dim;
    if (d < m + 2)
        throw InputError("gen_bridge_instance: spectrum dim must be >= m + 2");
    if (spectrum.eigenvalues.size() != d)
        throw InputError("gen_bridge_instance: eigenvalue count does not match dim");
    if (!(spectrum.R >= 0.0) || !(spectrum.r > 0.0))
        throw InputError("gen_bridge_instance: need R >= 0 and r > 0");
    if (n < 8) throw InputError("gen_bridge_instance: n too small");

    const double lambda_m1 = spectrum.eigenvalues(m);
    if (!(lambda_m1 > 0.0)) throw InputError("gen_bridge_instance: lambda_{m+1} must be > 0");
    const double s_norm = spectrum.R * std::pow(lambda_m1, spectrum.r);
    const double dp = p_a - p_b;
    const double sigma_bar = 0.5 * (p_a + p_b);
    const double dev = std::min(0.3, s_norm);

    // Score direction: class axis plus equal components along the two
    // delta_y coordinates, sized so <w, delta_y> = dev * delta_p.
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    w(0) = 1.0;
    if (s_norm > 0.0) {
        w(m) = dev * dp / s_norm;       // coordinate m+1 (0-based m)
        w(m + 1) = dev * dp / s_norm;   // coordinate m+2
    }
    const double W = w.norm();

    // Cell means: coordinate 1 carries (1 - dev) y + dev sigma_bar; the
    // delta_y halves sit on coordinates m+1 (class 1) and m+2 (class 0).
    Eigen::VectorXd mean_cell[2][2];
    for (int y = 0; y < 2; ++y)
        for (int g = 0; g < 2; ++g) {
            Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
            mu(0) = (1.0 - dev) * y + dev * sigma_bar;
            const double half = (g == 0 ? 0.5 : -0.5) * s_norm;
            if (y == 1)
                mu(m) = half;
            else
                mu(m + 1) = half;
            mean_cell[y][g] = mu;
        }

    const double headroom = dev > 0.0
                                ? dev * std::min({p_a, p_b, 1.0 - p_a, 1.0 - p_b})
                                : 0.25;
    double sigma_x = std::min(0.02, headroom / 3.5) / std::max(1.0, W);

    constexpr int kRetryCap = 5;
    for (int attempt = 0;; ++attempt) {
        Rng rng(split_seed(seed, static_cast<std::uint64_t>(attempt)));
        BridgeInstance inst;
        inst.retries = attempt;
        inst.W = W;
        inst.rhoM_true = s_norm;
        inst.absDeltaP = std::abs(dp);
        inst.dev = dev;
        inst.table.features.resize(n, d);
        inst.table.y.resize(static_cast<std::size_t>(n));
        inst.table.g.resize(static_cast<std::size_t>(n));
        inst.table.score.emplace(n);

        long clipped = 0;
        for (long i = 0; i < n; ++i) {
            const bool in_a = rng.bernoulli(0.5);
            const double pg = in_a ? p_a : p_b;
            const int yi = rng.bernoulli(pg) ? 1 : 0;
            Eigen::VectorXd x = mean_cell[yi][in_a ? 0 : 1];
            for (int k = 0; k < d; ++k) {
                if (dev == 0.0 && k == 0) continue;   // keep S = Y exact in the KMR limit
                x(k) += sigma_x * rng.normal();
            }
            double sc = w.dot(x);
            if (sc < 0.0 || sc > 1.0) {
                ++clipped;
                sc = std::clamp(sc, 0.0, 1.0);
            }
            inst.table.features.row(i) = x.transpose();
            inst.table.y[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(yi);
            inst.table.g[static_cast<std::size_t>(i)] = in_a ? Group::A : Group::B;
            (*inst.table.score)(i) = sc;
        }
        inst.clip_fraction = static_cast<double>(clipped) / static_cast<double>(n);
        if (inst.clip_fraction > 1e-3) {
            if (attempt + 1 >= kRetryCap)
                throw DegenerateDataError(
                    "gen_bridge_instance: infeasible clipping: score mass outside [0,1] "
                    "exceeds 1e-3 after retries");
            sigma_x *= 0.5;
            continue;
        }

        // Post-clip affine recalibration: shift each group's scores onto its
        // empirical base rate, then re-clip and report the residual.
        require_cells_nonempty(inst.table);
        Eigen::VectorXd& sc = *inst.table.score;
        for (int gi = 0; gi < 2; ++gi) {
            const Group grp = gi == 0 ? Group::A : Group::B;
            const auto idx = inst.table.group_indices(grp);
            const double target = inst.table.base_rate(grp);
            double mean = 0.0;
            for (int i : idx) mean += sc(i);
            mean /= static_cast<double>(idx.size());
            const double shift = target - mean;
            double post = 0.0;
            for (int i : idx) {
                sc(i) = std::clamp(sc(i) + shift, 0.0, 1.0);
                post += sc(i);
            }
            post /= static_cast<double>(idx.size());
            inst.recal_residual[gi] = std::abs(post - target);
        }
        return inst;
    }
}

double mmd_oracle(const std::vector<int>& idxA, const std::vector<int>& idxB,
                  const KernelSpec& spec, const Eigen::MatrixXd& X) {
    if (idxA.empty() || idxB.empty()) throw InputError("mmd_oracle: empty index set");
    double sAA = 0.0, sAB = 0.0, sBB = 0.0;
    for (int i : idxA)
        for (int j : idxA)
            sAA += eval_kernel(spec, X.row(i).transpose(), X.row(j).transpose());
    for (int i : idxA)
        for (int j : idxB)
            sAB += eval_kernel(spec, X.row(i).transpose(), X.row(j).transpose());
    for (int i : idxB)
        for (int j : idxB)
            sBB += eval_kernel(spec, X.row(i).transpose(), X.row(j).transpose());
    const double nA = static_cast<double>(idxA.size());
    const double nB = static_cast<double>(idxB.size());
    return sAA / (nA * nA) - 2.0 * sAB / (nA * nB) + sBB / (nB * nB);
}

} // namespace kfa
