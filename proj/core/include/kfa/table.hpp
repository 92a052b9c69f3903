#ifndef KFA_TABLE_HPP
#define KFA_TABLE_HPP

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kfa/errors.hpp"

namespace kfa {

/// Binary group labels. Group a is the reference group throughout.
enum class Group : std::int8_t { A = 0, B = 1 };

inline const char* group_name(Group g) { return g == Group::A ? "a" : "b"; }

/// The audited population: one row per individual, with a feature vector,
/// binary outcome y, binary group g, and optionally a score in [0,1] and a
/// binary prediction.
struct SampleTable {
    Eigen::MatrixXd features;                       // n x d
    std::vector<std::int8_t> y;                     // 0/1
    std::vector<Group> g;
    std::optional<Eigen::VectorXd> score;           // s in [0,1]
    std::optional<std::vector<std::int8_t>> yhat;   // 0/1

    Eigen::Index n() const { return features.rows(); }
    Eigen::Index dim() const { return features.cols(); }

    bool has_score() const { return score.has_value(); }
    bool has_yhat() const { return yhat.has_value(); }

    std::vector<int> group_indices(Group grp) const {
        std::vector<int> idx;
        for (int i = 0; i < static_cast<int>(y.size()); ++i)
            if (g[i] == grp) idx.push_back(i);
        return idx;
    }

    std::vector<int> cell_indices(int label, Group grp) const {
        std::vector<int> idx;
        for (int i = 0; i < static_cast<int>(y.size()); ++i)
            if (y[i] == label && g[i] == grp) idx.push_back(i);
        return idx;
    }

    /// Counts as {n_{0,a}, n_{1,a}, n_{0,b}, n_{1,b}}.
    std::array<long, 4> cell_counts() const {
        std::array<long, 4> c{0, 0, 0, 0};
        for (std::size_t i = 0; i < y.size(); ++i)
            c[static_cast<std::size_t>(g[i]) * 2 + y[i]] += 1;
        return c;
    }

    long group_count(Group grp) const {
        const auto c = cell_counts();
        return grp == Group::A ? c[0] + c[1] : c[2] + c[3];
    }

    /// Empirical base rate Pr[Y=1 | G=g]. Throws if the group is empty.
    double base_rate(Group grp) const {
        const auto c = cell_counts();
        const long n1 = grp == Group::A ? c[1] : c[3];
        const long ng = group_count(grp);
        if (ng == 0)
            throw InputError(std::string("empty group ") + group_name(grp));
        return static_cast<double>(n1) / static_cast<double>(ng);
    }

    /// New table holding the given rows (duplicates allowed; used by the
    /// bootstrap). Order follows idx.
    SampleTable gather(const std::vector<int>& idx) const {
        SampleTable out;
        out.features.resize(static_cast<Eigen::Index>(idx.size()), features.cols());
        out.y.resize(idx.size());
        out.g.resize(idx.size());
        if (score) out.score.emplace(static_cast<Eigen::Index>(idx.size()));
        if (yhat) out.yhat.emplace(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const int i = idx[k];
            out.features.row(static_cast<Eigen::Index>(k)) = features.row(i);
            out.y[k] = y[i];
            out.g[k] = g[i];
            if (score) (*out.score)(static_cast<Eigen::Index>(k)) = (*score)(i);
            if (yhat) (*out.yhat)[k] = (*yhat)[i];
        }
        return out;
    }
};

/// Throws InputError naming the first empty (y, g) cell, if any.
inline void require_cells_nonempty(const SampleTable& t) {
    const auto c = t.cell_counts();
    static constexpr const char* names[4] = {"(y=0,g=a)", "(y=1,g=a)", "(y=0,g=b)", "(y=1,g=b)"};
    for (int k = 0; k < 4; ++k)
        if (c[k] == 0) throw InputError(std::string("empty ") + names[k] + " cell");
}

} // namespace kfa

#endif
