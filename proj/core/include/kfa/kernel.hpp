#ifndef KFA_KERNEL_HPP
#define KFA_KERNEL_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "kfa/errors.hpp"

namespace kfa {

enum class KernelFamily { GaussianRbf, Laplace, Linear };

KernelFamily parse_kernel_family(const std::string& name);
std::string kernel_family_name(KernelFamily family);

/// Kernel choice plus bandwidth. The bandwidth is ignored for the linear
/// kernel and must be positive otherwise.
struct KernelSpec {
    KernelFamily family = KernelFamily::GaussianRbf;
    double bandwidth = 1.0;

    static KernelSpec rbf(double sigma);
    static KernelSpec laplace(double sigma);
    static KernelSpec linear();
};

/// Dense kernel matrix over one sample. Stored exactly symmetric; the
/// diagonal is exactly k(x, x) (1.0 for rbf/laplace).
struct Gram {
    Eigen::MatrixXd values;
    KernelSpec spec;
    Eigen::Index n = 0;
};

/// k(x, x2). rbf: exp(-||x-x2||^2 / (2 sigma^2)); laplace: exp(-||x-x2||_1 / sigma);
/// linear: <x, x2>. Throws InputError on dimension mismatch or non-finite input.
double eval_kernel(const KernelSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& x2);

/// Pairwise kernel matrix of the rows of X. Row blocks are computed in
/// parallel; the upper triangle is mirrored so K is exactly symmetric.
Gram gram(const KernelSpec& spec, const Eigen::MatrixXd& X);

/// n x m kernel matrix between the rows of X and the rows of Z.
Eigen::MatrixXd cross_gram(const KernelSpec& spec, const Eigen::MatrixXd& X,
                           const Eigen::MatrixXd& Z);

/// Bandwidth by the median heuristic: sigma^2 is the median of pairwise
/// squared Euclidean distances over a seeded uniform subsample (without
/// replacement) of at most `cap` rows; even counts average the two central
/// order statistics. Throws DegenerateDataError when the median distance
/// is zero.
double median_heuristic(const Eigen::MatrixXd& X, Eigen::Index cap = 5000,
                        std::uint64_t seed = 0);

} // namespace kfa

#endif
