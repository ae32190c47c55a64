#include "speed/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

namespace speed {

void apply_sign_convention(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index imax = 0;
    double best = std::abs(vectors(0, j));
    for (Eigen::Index i = 1; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, j));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    if (vectors(imax, j) < 0.0) vectors.col(j) = -vectors.col(j);
  }
}

double eigenvalue_cutoff(Eigen::Index n, double lambda_max) {
  return 1e-10 * static_cast<double>(n) * lambda_max;
}

Eigen::Index usable_rank(const EigenSystem& sys) {
  const double cut = eigenvalue_cutoff(sys.size(), sys.eigenvalues[0]);
  Eigen::Index r = 0;
  while (r < sys.size() && sys.eigenvalues[r] > cut) ++r;
  return r;
}

EigenSystem decompose(const GramMatrix& gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram.entries);
  if (solver.info() != Eigen::Success)
    throw NumericalError("decompose: symmetric eigensolver failed to converge on a " +
                         std::to_string(gram.size()) + "x" +
                         std::to_string(gram.size()) + " Gram matrix");
  const Eigen::Index n = gram.size();
  EigenSystem sys;
  sys.eigenvalues = solver.eigenvalues().reverse();
  sys.eigenvectors = solver.eigenvectors().rowwise().reverse();
  apply_sign_convention(sys.eigenvectors);
  return sys;
}

Eigenmap build_eigenmap(const EigenSystem& sys, const Eigen::MatrixXd& dictionary,
                        const KernelConfig& kernel, Eigen::Index m) {
  if (m < 1) throw ArgumentError("build_eigenmap: m must be positive");
  if (dictionary.cols() != sys.size())
    throw ArgumentError("build_eigenmap: dictionary size does not match eigensystem");
  const Eigen::Index rank = usable_rank(sys);
  if (m > rank)
    throw ArgumentError("build_eigenmap: m = " + std::to_string(m) +
                        " exceeds the numerically usable rank " + std::to_string(rank));
  Eigenmap map;
  map.psi.resize(m, sys.size());
  for (Eigen::Index i = 0; i < m; ++i)
    map.psi.row(i) = sys.eigenvectors.col(i).transpose() / std::sqrt(sys.eigenvalues[i]);
  map.dictionary = dictionary;
  map.kernel = kernel;
  map.eigenvalues_kept = sys.eigenvalues.head(m);
  return map;
}

Eigen::VectorXd embed(const Eigenmap& map, const Eigen::VectorXd& x) {
  return map.psi * kernel_vector(map.kernel, map.dictionary, x);
}

Eigen::MatrixXd reconstruct_gram(const Eigenmap& map) {
  const Eigen::MatrixXd k = gram_matrix(map.kernel, map.dictionary).entries;
  const Eigen::MatrixXd embedded = map.psi * k;
  return embedded.transpose() * embedded;
}

double frobenius_error(const Eigen::MatrixXd& k, const Eigen::MatrixXd& k_hat) {
  if (k.rows() != k_hat.rows() || k.cols() != k_hat.cols())
    throw ArgumentError("frobenius_error: shape mismatch");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < k.cols(); ++j) {
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
      const double denom = std::abs(k(i, j));
      if (denom == 0.0)
        throw ArgumentError("frobenius_error: zero reference entry cannot be normalized");
      const double r = std::abs(k(i, j) - k_hat(i, j)) / denom;
      sum += r * r;
    }
  }
  return std::sqrt(sum / static_cast<double>(k.rows() * k.cols()));
}

double subspace_distance(const Eigenmap& a, const Eigenmap& b) {
  if (a.subspace_dim() != b.subspace_dim())
    throw ArgumentError("subspace_distance: subspace dimensions differ");
  if (a.kernel.family != b.kernel.family || a.kernel.bandwidth != b.kernel.bandwidth)
    throw ArgumentError("subspace_distance: kernels differ");
  const Eigen::MatrixXd k_ab = cross_kernel(a.kernel, a.dictionary, b.dictionary);
  // psi already carries the 1/sqrt(lambda) scaling on both sides.
  const Eigen::MatrixXd m = a.psi * k_ab * b.psi.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double c = std::clamp(svd.singularValues()[i], 0.0, 1.0);
    const double theta = std::acos(c);
    sum += theta * theta;
  }
  return std::sqrt(sum);
}

}  // namespace speed
