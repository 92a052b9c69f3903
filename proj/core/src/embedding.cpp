#include "kfa/embedding.hpp"

#include <atomic>
#include <cmath>
#include <string>

namespace kfa {

namespace {
std::atomic<std::uint64_t> g_clamp_count{0};

void check_size(const EmbeddingCoeffs& a, const Gram& K, const char* who) {
    if (a.weights.size() != K.n)
        throw InputError(std::string(who) + ": coefficient length " +
                         std::to_string(a.weights.size()) + " does not match Gram size " +
                         std::to_string(K.n));
}
} // namespace

std::uint64_t clamp_count() { return g_clamp_count.load(); }
void reset_clamp_count() { g_clamp_count.store(0); }

EmbeddingCoeffs operator-(const EmbeddingCoeffs& a, const EmbeddingCoeffs& b) {
    if (a.weights.size() != b.weights.size())
        throw InputError("embedding difference: size mismatch");
    return {a.weights - b.weights, EmbeddingCoeffs::Kind::Difference};
}

EmbeddingCoeffs mean_embedding(const SampleTable& table, const std::vector<int>& subset) {
    if (subset.empty()) throw InputError("mean_embedding: empty subset");
    EmbeddingCoeffs out;
    out.kind = EmbeddingCoeffs::Kind::Mean;
    out.weights = Eigen::VectorXd::Zero(table.n());
    const double w = 1.0 / static_cast<double>(subset.size());
    for (int i : subset) {
        if (i < 0 || i >= table.n()) throw InputError("mean_embedding: index out of range");
        out.weights(i) += w;
    }
    return out;
}

ConditionalEmbeddings conditional_embeddings(const SampleTable& table) {
    require_cells_nonempty(table);
    ConditionalEmbeddings out;
    out.mu_a = mean_embedding(table, table.group_indices(Group::A));
    out.mu_b = mean_embedding(table, table.group_indices(Group::B));
    for (int y = 0; y < 2; ++y) {
        out.mu_ya[y][0] = mean_embedding(table, table.cell_indices(y, Group::A));
        out.mu_ya[y][1] = mean_embedding(table, table.cell_indices(y, Group::B));
        out.delta_y[y] = out.mu_ya[y][0] - out.mu_ya[y][1];
    }
    out.delta = out.mu_a - out.mu_b;
    out.p_a = table.base_rate(Group::A);
    out.p_b = table.base_rate(Group::B);
    out.delta_p = out.p_a - out.p_b;
    out.degenerate_base_rate =
        out.p_a == 0.0 || out.p_a == 1.0 || out.p_b == 0.0 || out.p_b == 1.0;
    return out;
}

double rkhs_inner(const EmbeddingCoeffs& alpha, const EmbeddingCoeffs& beta, const Gram& K) {
    check_size(alpha, K, "rkhs_inner");
    check_size(beta, K, "rkhs_inner");
    return alpha.weights.dot(K.values * beta.weights);
}

double rkhs_norm(const EmbeddingCoeffs& alpha, const Gram& K) {
    double q = rkhs_inner(alpha, alpha, K);
    if (q < 0.0) {
        g_clamp_count.fetch_add(1, std::memory_order_relaxed);
        q = 0.0;
    }
    return std::sqrt(q);
}

double mmd2_vstat(const std::vector<int>& idxA, const std::vector<int>& idxB, const Gram& K) {
    if (idxA.empty() || idxB.empty()) throw InputError("mmd2_vstat: empty index set");
    const auto& V = K.values;
    double sAA = 0.0, sAB = 0.0, sBB = 0.0;
    for (int i : idxA)
        for (int j : idxA) sAA += V(i, j);
    for (int i : idxA)
        for (int j : idxB) sAB += V(i, j);
    for (int i : idxB)
        for (int j : idxB) sBB += V(i, j);
    const double nA = static_cast<double>(idxA.size());
    const double nB = static_cast<double>(idxB.size());
    return sAA / (nA * nA) - 2.0 * sAB / (nA * nB) + sBB / (nB * nB);
}

Eigen::VectorXd witness_eval(const EmbeddingCoeffs& alphaP, const EmbeddingCoeffs& alphaQ,
                             const Gram& K, const Eigen::MatrixXd& crossK) {
    const EmbeddingCoeffs diff = alphaP - alphaQ;
    check_size(diff, K, "witness_eval");
    if (crossK.rows() != K.n) throw InputError("witness_eval: crossK row count mismatch");
    const double q = rkhs_inner(diff, diff, K);
    if (q <= kDegenerateDelta2Tol)
        throw DegenerateDataError("witness undefined: embeddings coincide");
    return crossK.transpose() * diff.weights / std::sqrt(q);
}

} // namespace kfa
