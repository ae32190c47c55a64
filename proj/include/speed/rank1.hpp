#pragma once

#include <Eigen/Core>

#include "speed/spectral.hpp"

namespace speed {

/// Symmetric rank-1 additive perturbation rho * kappa * kappa^T.
struct Rank1Perturbation {
  double rho = 0.0;
  Eigen::VectorXd kappa;

  Rank1Perturbation() = default;
  Rank1Perturbation(double r, Eigen::VectorXd k);
};

/// Roots of the secular equation 1 + rho * sum_i kt_i^2 / (lambda_i - x)
/// for a rank-1 perturbation of a diagonalized symmetric matrix.
///
/// `eigenvalues` must be sorted ascending; `kappa_tilde` is the perturbation
/// vector already rotated into the eigenbasis (V^T kappa). Components with
/// |kt_i| <= 1e-12 * |kt| deflate (the eigenvalue passes through unchanged),
/// as do eigenvalues coinciding within 1e-12 * max|lambda|. Returns the n
/// updated eigenvalues sorted ascending; every non-deflated root is verified
/// against its interlacing bracket.
Eigen::VectorXd secular_roots(const Eigen::VectorXd& eigenvalues, double rho,
                              const Eigen::VectorXd& kappa_tilde);

/// Eigenvectors of the perturbed matrix from the updated eigenvalues:
/// column j is V D_j^{-1} kt / |D_j^{-1} kt| with D_j = diag(lambda) - new_j I,
/// where kt is first re-derived from the computed roots so the columns stay
/// numerically orthogonal. Deflated eigenpairs pass through (after any
/// pairwise rotation used to deflate coincident eigenvalues).
///
/// `eigenvalues_old` ascending; `eigenvalues_new` as returned by
/// secular_roots for the same perturbation. Output columns match the order
/// of `eigenvalues_new` and carry the sign convention.
Eigen::MatrixXd update_eigenvectors(const Eigen::MatrixXd& vectors,
                                    const Eigen::VectorXd& eigenvalues_old,
                                    const Eigen::VectorXd& eigenvalues_new,
                                    const Eigen::VectorXd& kappa_tilde);

/// In-place rank-1 update of an ascending-ordered eigensystem. This is the
/// single entry point a different rank-1 algorithm would replace.
void rank1_update(Eigen::VectorXd& values, Eigen::MatrixXd& vectors,
                  const Rank1Perturbation& perturbation);

/// Eigendecomposition of the (n+1) x (n+1) Gram matrix obtained by
/// appending one dictionary point, from the eigendecomposition of the
/// n x n Gram matrix. `k_vec` holds the kernel evaluations of the new
/// point against the dictionary and `k_self` its self-similarity
/// (1 for the Gaussian family). The expansion appends eigenpair
/// (k_self/4, e_{n+1}) and applies two rank-1 updates with
/// rho = 4/k_self, kappa_1 = [k_vec; k_self/2], kappa_2 = [k_vec; k_self/4].
EigenSystem grow_eigensystem(const EigenSystem& sys, const Eigen::VectorXd& k_vec,
                             double k_self);

/// Modified Gram-Schmidt pass over the columns. Restores orthonormality
/// after long chains of incremental updates.
void orthonormalize(Eigen::MatrixXd& vectors);

}  // namespace speed
