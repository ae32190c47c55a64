#pragma once

#include <Eigen/Core>

#include "speed/kernel.hpp"

namespace speed {

/// Eigendecomposition of a Gram matrix. Eigenvalues sorted descending,
/// eigenvectors stored as columns in matching order. Each column is
/// sign-normalized so its largest-magnitude entry (first such index on
/// ties) is positive.
struct EigenSystem {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  Eigen::Index size() const { return eigenvalues.size(); }
};

/// The m x n map from kernel evaluation vectors to coordinates in the
/// space spanned by the m dominant eigenfunctions: row i is the i-th
/// eigenvector transposed, scaled by 1/sqrt(lambda_i).
struct Eigenmap {
  Eigen::MatrixXd psi;
  Eigen::MatrixXd dictionary;
  KernelConfig kernel;
  Eigen::VectorXd eigenvalues_kept;

  Eigen::Index subspace_dim() const { return psi.rows(); }
  Eigen::Index dictionary_size() const { return psi.cols(); }
};

/// Flip eigenvector columns so the largest-magnitude entry of each is
/// positive (ties: first such index). Keeps regression output reproducible;
/// eigenvectors are only defined up to sign.
void apply_sign_convention(Eigen::MatrixXd& vectors);

/// Eigenvalue cutoff below which eigenfunctions are considered numerically
/// unusable (1/sqrt(lambda) would amplify noise).
double eigenvalue_cutoff(Eigen::Index n, double lambda_max);

/// Number of eigenvalues above the cutoff.
Eigen::Index usable_rank(const EigenSystem& sys);

/// Full symmetric eigendecomposition, sorted descending.
EigenSystem decompose(const GramMatrix& gram);

Eigenmap build_eigenmap(const EigenSystem& sys, const Eigen::MatrixXd& dictionary,
                        const KernelConfig& kernel, Eigen::Index m);

/// Coordinates of x in the eigenfunction basis: psi * k_x.
Eigen::VectorXd embed(const Eigenmap& map, const Eigen::VectorXd& x);

/// Gram matrix of the dictionary as reconstructed from embedded dot
/// products; equals the best rank-m approximation V_m Lambda_m V_m^T.
Eigen::MatrixXd reconstruct_gram(const Eigenmap& map);

/// Normalized elementwise Frobenius error:
/// sqrt( mean over entries of (|k_ij - khat_ij| / |k_ij|)^2 ).
double frobenius_error(const Eigen::MatrixXd& k, const Eigen::MatrixXd& k_hat);

/// Principal-angle distance sqrt(sum theta_i^2) between the spans of two
/// eigenmaps, computed from the cross-kernel matrix of their dictionaries.
double subspace_distance(const Eigenmap& a, const Eigenmap& b);

}  // namespace speed
