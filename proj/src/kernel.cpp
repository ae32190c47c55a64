#include "speed/kernel.hpp"

#include <cmath>

namespace speed {

double kernel_eval(const KernelConfig& cfg, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y) {
  if (x.size() != y.size())
    throw ArgumentError("kernel_eval: inputs have mismatched dimensions");
  if (x.size() < 1) throw ArgumentError("kernel_eval: empty input");
  double d2 = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    d2 += diff * diff;
  }
  const double s = cfg.bandwidth;
  return std::exp(-d2 / (2.0 * s * s));
}

Eigen::VectorXd kernel_vector(const KernelConfig& cfg,
                              const Eigen::MatrixXd& dictionary,
                              const Eigen::VectorXd& x) {
  const Eigen::Index n = dictionary.cols();
  if (n == 0) throw ArgumentError("kernel_vector: dictionary is empty");
  if (dictionary.rows() != x.size())
    throw ArgumentError("kernel_vector: point dimension does not match dictionary");
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i)
    k[i] = kernel_eval(cfg, dictionary.col(i), x);
  return k;
}

Eigen::MatrixXd cross_kernel(const KernelConfig& cfg, const Eigen::MatrixXd& a,
                             const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows())
    throw ArgumentError("cross_kernel: dictionaries have mismatched dimensions");
  Eigen::MatrixXd k(a.cols(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j)
    for (Eigen::Index i = 0; i < a.cols(); ++i)
      k(i, j) = kernel_eval(cfg, a.col(i), b.col(j));
  return k;
}

GramMatrix gram_matrix(const KernelConfig& cfg, const Eigen::MatrixXd& dictionary) {
  const Eigen::Index n = dictionary.cols();
  if (n < 1) throw ArgumentError("gram_matrix: dictionary is empty");
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = kernel_eval(cfg, dictionary.col(j), dictionary.col(j));
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = kernel_eval(cfg, dictionary.col(i), dictionary.col(j));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return GramMatrix{std::move(k), dictionary};
}

}  // namespace speed
