#pragma once

#include <Eigen/Core>

#include "speed/errors.hpp"

namespace speed {

enum class KernelFamily { Gaussian };

/// Similarity function configuration. The Gaussian family evaluates
/// exp(-|x-y|^2 / (2 sigma^2)); the squared norm is accumulated as
/// sum_i (x_i - y_i)^2, which makes the evaluation exactly symmetric
/// in its arguments.
struct KernelConfig {
  KernelFamily family = KernelFamily::Gaussian;
  double bandwidth = 1.0;

  KernelConfig() = default;
  KernelConfig(KernelFamily f, double sigma) : family(f), bandwidth(sigma) {
    if (!(sigma > 0.0)) throw ArgumentError("kernel bandwidth must be positive");
  }
};

inline KernelConfig gaussian_kernel(double sigma) {
  return KernelConfig(KernelFamily::Gaussian, sigma);
}

/// Pairwise kernel evaluations over a dictionary (points are columns).
struct GramMatrix {
  Eigen::MatrixXd entries;
  Eigen::MatrixXd dictionary;

  Eigen::Index size() const { return entries.rows(); }
};

double kernel_eval(const KernelConfig& cfg, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y);

/// Vector of kernel evaluations between every dictionary point and x.
Eigen::VectorXd kernel_vector(const KernelConfig& cfg,
                              const Eigen::MatrixXd& dictionary,
                              const Eigen::VectorXd& x);

/// Cross-kernel matrix between two dictionaries, entry (i,j) = k(a_i, b_j).
Eigen::MatrixXd cross_kernel(const KernelConfig& cfg, const Eigen::MatrixXd& a,
                             const Eigen::MatrixXd& b);

GramMatrix gram_matrix(const KernelConfig& cfg, const Eigen::MatrixXd& dictionary);

}  // namespace speed
