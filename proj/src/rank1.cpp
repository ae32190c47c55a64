#include "speed/rank1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace speed {
namespace {

constexpr double kDeflateKappaRel = 1e-12;
constexpr double kDeflateEigRel = 1e-12;
constexpr int kMaxRootIter = 200;

bool is_ascending(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1]) return false;
  return true;
}

/// Deflation analysis shared by the eigenvalue and eigenvector updates.
/// Rotations for coincident eigenvalues are applied to the working copies
/// of V (when supplied) and kappa_tilde; deflated components are zeroed.
struct Deflation {
  Eigen::VectorXd kt;            // effective kappa_tilde, exact zeros when deflated
  std::vector<bool> deflated;    // per slot
  std::vector<Eigen::Index> active;
};

Deflation analyze_deflation(const Eigen::VectorXd& values, Eigen::VectorXd kt,
                            Eigen::MatrixXd* vectors) {
  const Eigen::Index n = values.size();
  Deflation d;
  d.deflated.assign(static_cast<std::size_t>(n), false);
  const double knorm = kt.norm();
  const double lam_max =
      std::max({std::abs(values[0]), std::abs(values[n - 1]), 1e-300});
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(kt[i]) <= kDeflateKappaRel * knorm) d.deflated[i] = true;
  // Coincident eigenvalues: rotate the pair so the second component vanishes.
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (d.deflated[i]) continue;
    const Eigen::Index j = i + 1;
    if (d.deflated[j]) continue;
    if (std::abs(values[j] - values[i]) <= kDeflateEigRel * lam_max) {
      const double r = std::hypot(kt[i], kt[j]);
      const double c = kt[i] / r;
      const double s = kt[j] / r;
      kt[i] = r;
      kt[j] = 0.0;
      if (vectors) {
        const Eigen::VectorXd vi = vectors->col(i);
        vectors->col(i) = c * vi + s * vectors->col(j);
        vectors->col(j) = -s * vi + c * vectors->col(j);
      }
      d.deflated[j] = true;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d.deflated[i])
      kt[i] = 0.0;
    else
      d.active.push_back(i);
  }
  d.kt = std::move(kt);
  return d;
}

/// Root of 1 + rho * sum_i z2_i / (delta_i - mu) inside (lo, hi), where
/// delta_i = d_i - anchor. Newton iteration safeguarded by bisection; the
/// function is strictly monotone between consecutive poles.
double solve_shifted(const Eigen::VectorXd& delta, const Eigen::VectorXd& z2,
                     double rho, double lo, double hi) {
  const bool increasing = rho > 0.0;
  double a = lo, b = hi;
  double mu = 0.5 * (a + b);
  for (int iter = 0; iter < kMaxRootIter; ++iter) {
    double w = 1.0;
    double dw = 0.0;
    for (Eigen::Index i = 0; i < delta.size(); ++i) {
      const double diff = delta[i] - mu;
      const double t = z2[i] / diff;
      w += rho * t;
      dw += rho * t / diff;
    }
    if (!std::isfinite(w)) {
      mu = 0.5 * (a + b);
      continue;
    }
    if (w == 0.0) return mu;
    if ((w < 0.0) == increasing)
      a = mu;
    else
      b = mu;
    double next = (dw != 0.0) ? mu - w / dw : 0.5 * (a + b);
    if (!(a < next && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - mu) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                       std::abs(next) +
                                   1e-300)
      return next;
    mu = next;
  }
  throw NumericalError(
      "secular root finder failed to converge within " +
      std::to_string(kMaxRootIter) + " iterations (bracket [" +
      std::to_string(lo) + ", " + std::to_string(hi) + "])");
}

/// Secular roots of the deflated (active) problem, expressed as offsets from
/// anchor poles so downstream differences keep full relative precision.
struct ShiftedRoots {
  std::vector<Eigen::Index> anchor;  // index into the active pole array
  std::vector<double> mu;            // root = d[anchor] + mu

  double value(const Eigen::VectorXd& d, std::size_t j) const {
    return d[anchor[j]] + mu[j];
  }
};

ShiftedRoots solve_all_roots(const Eigen::VectorXd& d, double rho,
                             const Eigen::VectorXd& z) {
  const Eigen::Index na = d.size();
  const Eigen::VectorXd z2 = z.array().square();
  const double ztz = z2.sum();
  ShiftedRoots out;
  out.anchor.resize(static_cast<std::size_t>(na));
  out.mu.resize(static_cast<std::size_t>(na));
  if (na == 1) {
    out.anchor[0] = 0;
    out.mu[0] = rho * z2[0];
    return out;
  }
  for (Eigen::Index k = 0; k < na; ++k) {
    Eigen::Index left, right;
    if (rho > 0.0) {
      if (k == na - 1) {  // topmost root, bounded by lambda_n + rho |z|^2
        out.anchor[k] = na - 1;
        const Eigen::VectorXd delta = d.array() - d[na - 1];
        out.mu[k] = solve_shifted(delta, z2, rho, 0.0, rho * ztz);
        continue;
      }
      left = k;
      right = k + 1;
    } else {
      if (k == 0) {  // lowest root, bounded by lambda_1 + rho |z|^2
        out.anchor[0] = 0;
        const Eigen::VectorXd delta = d.array() - d[0];
        out.mu[0] = solve_shifted(delta, z2, rho, rho * ztz, 0.0);
        continue;
      }
      left = k - 1;
      right = k;
    }
    const double mid = 0.5 * (d[left] + d[right]);
    double wmid = 1.0;
    for (Eigen::Index i = 0; i < na; ++i) wmid += rho * z2[i] / (d[i] - mid);
    if (wmid == 0.0) {
      out.anchor[k] = left;
      out.mu[k] = mid - d[left];
      continue;
    }
    const bool root_right = (rho > 0.0) ? (wmid < 0.0) : (wmid > 0.0);
    if (root_right) {
      out.anchor[k] = right;
      const Eigen::VectorXd delta = d.array() - d[right];
      out.mu[k] = solve_shifted(delta, z2, rho, mid - d[right], 0.0);
    } else {
      out.anchor[k] = left;
      const Eigen::VectorXd delta = d.array() - d[left];
      out.mu[k] = solve_shifted(delta, z2, rho, 0.0, mid - d[left]);
    }
  }
  return out;
}

/// Perturbation vector consistent with the computed roots (Gu-Eisenstat):
/// rho * zhat_i^2 = prod_j (root_j - d_i) / prod_{k != i} (d_k - d_i).
/// Using zhat instead of the original kappa_tilde keeps the updated
/// eigenvectors orthogonal to machine precision.
Eigen::VectorXd consistent_z(const Eigen::VectorXd& d, double rho,
                             const Eigen::VectorXd& z, const ShiftedRoots& roots) {
  const Eigen::Index na = d.size();
  Eigen::VectorXd zhat(na);
  for (Eigen::Index i = 0; i < na; ++i) {
    double p = ((d[roots.anchor[static_cast<std::size_t>(i)]] - d[i]) +
                roots.mu[static_cast<std::size_t>(i)]) /
               rho;
    for (Eigen::Index j = 0; j < na; ++j) {
      if (j == i) continue;
      const double num =
          (d[roots.anchor[static_cast<std::size_t>(j)]] - d[i]) +
          roots.mu[static_cast<std::size_t>(j)];
      p *= num / (d[j] - d[i]);
    }
    zhat[i] = std::copysign(std::sqrt(std::abs(p)), z[i]);
  }
  return zhat;
}

struct SlotUpdate {
  Eigen::VectorXd values;   // per-slot updated eigenvalues (unsorted)
  Eigen::MatrixXd vectors;  // per-slot updated eigenvectors
};

/// Full rank-1 update in slot order (no final sort). `values` ascending.
SlotUpdate apply_rank1(const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors,
                       double rho, const Eigen::VectorXd& kappa) {
  const Eigen::Index n = values.size();
  Eigen::MatrixXd work = vectors;
  Eigen::VectorXd kt = vectors.transpose() * kappa;
  Deflation defl = analyze_deflation(values, std::move(kt), &work);

  SlotUpdate out;
  out.values = values;
  out.vectors = work;
  const Eigen::Index na = static_cast<Eigen::Index>(defl.active.size());
  if (na == 0) return out;

  Eigen::VectorXd d(na), z(na);
  for (Eigen::Index a = 0; a < na; ++a) {
    d[a] = values[defl.active[static_cast<std::size_t>(a)]];
    z[a] = defl.kt[defl.active[static_cast<std::size_t>(a)]];
  }
  const ShiftedRoots roots = solve_all_roots(d, rho, z);
  const Eigen::VectorXd zhat = consistent_z(d, rho, z, roots);

  Eigen::MatrixXd active_cols(n, na);
  for (Eigen::Index a = 0; a < na; ++a)
    active_cols.col(a) = work.col(defl.active[static_cast<std::size_t>(a)]);

  Eigen::VectorXd u(na);
  for (Eigen::Index j = 0; j < na; ++j) {
    const Eigen::Index aj = roots.anchor[static_cast<std::size_t>(j)];
    const double muj = roots.mu[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < na; ++i)
      u[i] = zhat[i] / ((d[i] - d[aj]) - muj);
    const double norm = u.norm();
    if (!std::isfinite(norm) || norm == 0.0)
      throw NumericalError(
          "rank1_update: eigenvector scaling overflowed; eigenvalues too close "
          "to deflate cleanly");
    const Eigen::Index slot = defl.active[static_cast<std::size_t>(j)];
    out.vectors.col(slot) = active_cols * (u / norm);
    out.values[slot] = d[aj] + muj;
  }
  return out;
}

void sort_ascending(Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values[a] < values[b]; });
  Eigen::VectorXd sorted_vals(n);
  Eigen::MatrixXd sorted_vecs(vectors.rows(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sorted_vals[i] = values[order[static_cast<std::size_t>(i)]];
    sorted_vecs.col(i) = vectors.col(order[static_cast<std::size_t>(i)]);
  }
  values = std::move(sorted_vals);
  vectors = std::move(sorted_vecs);
}

void check_rank1_args(const Eigen::VectorXd& eigenvalues, double rho,
                      const Eigen::VectorXd& kappa_tilde) {
  if (eigenvalues.size() != kappa_tilde.size())
    throw ArgumentError("rank-1 update: eigenvalue/kappa size mismatch");
  if (eigenvalues.size() == 0) throw ArgumentError("rank-1 update: empty system");
  if (!std::isfinite(rho) || rho == 0.0)
    throw ArgumentError("rank-1 update: rho must be finite and nonzero");
  if (!is_ascending(eigenvalues))
    throw ArgumentError("rank-1 update: eigenvalues must be sorted ascending");
}

/// Interlacing bounds of the merged, sorted spectrum. With deflation the
/// bounds apply to the active sub-problem; the merged check below covers the
/// deflation-free case used by the randomized invariant tests.
void verify_interlacing(const Eigen::VectorXd& old_vals, double rho,
                        const Eigen::VectorXd& new_vals, double ktk) {
  const Eigen::Index n = old_vals.size();
  const double span = std::abs(rho) * ktk;
  const double slack = 1e-12 * (std::abs(old_vals[n - 1]) + span) + 1e-300;
  for (Eigen::Index i = 0; i < n; ++i) {
    double lo, hi;
    if (rho > 0.0) {
      lo = old_vals[i];
      hi = (i + 1 < n) ? old_vals[i + 1] : old_vals[n - 1] + span;
    } else {
      lo = (i > 0) ? old_vals[i - 1] : old_vals[0] - span;
      hi = old_vals[i];
    }
    if (new_vals[i] < lo - slack || new_vals[i] > hi + slack)
      throw NumericalError("secular_roots: interlacing bound violated at index " +
                           std::to_string(i));
  }
}

}  // namespace

Rank1Perturbation::Rank1Perturbation(double r, Eigen::VectorXd k)
    : rho(r), kappa(std::move(k)) {
  if (!std::isfinite(rho) || rho == 0.0)
    throw ArgumentError("Rank1Perturbation: rho must be finite and nonzero");
}

Eigen::VectorXd secular_roots(const Eigen::VectorXd& eigenvalues, double rho,
                              const Eigen::VectorXd& kappa_tilde) {
  check_rank1_args(eigenvalues, rho, kappa_tilde);
  const Eigen::Index n = eigenvalues.size();
  Deflation defl = analyze_deflation(eigenvalues, kappa_tilde, nullptr);
  Eigen::VectorXd out = eigenvalues;
  const Eigen::Index na = static_cast<Eigen::Index>(defl.active.size());
  if (na > 0) {
    Eigen::VectorXd d(na), z(na);
    for (Eigen::Index a = 0; a < na; ++a) {
      d[a] = eigenvalues[defl.active[static_cast<std::size_t>(a)]];
      z[a] = defl.kt[defl.active[static_cast<std::size_t>(a)]];
    }
    const ShiftedRoots roots = solve_all_roots(d, rho, z);
    for (Eigen::Index a = 0; a < na; ++a)
      out[defl.active[static_cast<std::size_t>(a)]] =
          roots.value(d, static_cast<std::size_t>(a));
  }
  std::sort(out.begin(), out.end());
  if (na == n) verify_interlacing(eigenvalues, rho, out, kappa_tilde.squaredNorm());
  return out;
}

Eigen::MatrixXd update_eigenvectors(const Eigen::MatrixXd& vectors,
                                    const Eigen::VectorXd& eigenvalues_old,
                                    const Eigen::VectorXd& eigenvalues_new,
                                    const Eigen::VectorXd& kappa_tilde) {
  if (vectors.cols() != eigenvalues_old.size() ||
      eigenvalues_new.size() != eigenvalues_old.size())
    throw ArgumentError("update_eigenvectors: size mismatch");
  if (!is_ascending(eigenvalues_old))
    throw ArgumentError("update_eigenvectors: eigenvalues_old must be ascending");
  const Eigen::Index n = eigenvalues_old.size();
  Eigen::MatrixXd work = vectors;
  Deflation defl = analyze_deflation(eigenvalues_old, kappa_tilde, &work);

  // Pair each entry of eigenvalues_new with either a deflated pass-through
  // slot (exact value match) or the next active root in ascending order.
  std::vector<Eigen::Index> deflated_slots;
  for (Eigen::Index i = 0; i < n; ++i)
    if (defl.deflated[static_cast<std::size_t>(i)]) deflated_slots.push_back(i);
  std::vector<bool> used(deflated_slots.size(), false);

  const Eigen::Index na = static_cast<Eigen::Index>(defl.active.size());
  Eigen::VectorXd d(na), z(na);
  for (Eigen::Index a = 0; a < na; ++a) {
    d[a] = eigenvalues_old[defl.active[static_cast<std::size_t>(a)]];
    z[a] = defl.kt[defl.active[static_cast<std::size_t>(a)]];
  }
  Eigen::MatrixXd active_cols(vectors.rows(), na);
  for (Eigen::Index a = 0; a < na; ++a)
    active_cols.col(a) = work.col(defl.active[static_cast<std::size_t>(a)]);

  // Re-derive a perturbation vector consistent with the supplied roots.
  std::vector<double> active_roots;
  {
    std::vector<bool> claimed(deflated_slots.size(), false);
    for (Eigen::Index i = 0; i < n; ++i) {
      bool matched = false;
      for (std::size_t s = 0; s < deflated_slots.size(); ++s) {
        if (!claimed[s] &&
            eigenvalues_new[i] == eigenvalues_old[deflated_slots[s]]) {
          claimed[s] = true;
          matched = true;
          break;
        }
      }
      if (!matched) active_roots.push_back(eigenvalues_new[i]);
    }
    if (static_cast<Eigen::Index>(active_roots.size()) != na)
      throw ArgumentError(
          "update_eigenvectors: eigenvalues_new do not match the deflation "
          "pattern of (eigenvalues_old, kappa_tilde)");
  }
  // zhat_i^2 up to the 1/rho factor, which cancels in the normalization.
  Eigen::VectorXd zhat(na);
  for (Eigen::Index i = 0; i < na; ++i) {
    double p = active_roots[static_cast<std::size_t>(i)] - d[i];
    for (Eigen::Index j = 0; j < na; ++j) {
      if (j == i) continue;
      p *= (active_roots[static_cast<std::size_t>(j)] - d[i]) / (d[j] - d[i]);
    }
    zhat[i] = std::copysign(std::sqrt(std::abs(p)), z[i]);
  }

  Eigen::MatrixXd out(vectors.rows(), n);
  std::size_t next_active = 0;
  std::vector<bool> claimed(deflated_slots.size(), false);
  Eigen::VectorXd u(na);
  for (Eigen::Index i = 0; i < n; ++i) {
    bool matched = false;
    for (std::size_t s = 0; s < deflated_slots.size(); ++s) {
      if (!claimed[s] && eigenvalues_new[i] == eigenvalues_old[deflated_slots[s]]) {
        claimed[s] = true;
        out.col(i) = work.col(deflated_slots[s]);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    const double root = active_roots[next_active++];
    for (Eigen::Index a = 0; a < na; ++a) u[a] = zhat[a] / (d[a] - root);
    const double norm = u.norm();
    if (!std::isfinite(norm) || norm == 0.0)
      throw NumericalError(
          "update_eigenvectors: eigenvector scaling overflowed; caller should "
          "have deflated coincident eigenvalues");
    out.col(i) = active_cols * (u / norm);
  }
  apply_sign_convention(out);
  return out;
}

void rank1_update(Eigen::VectorXd& values, Eigen::MatrixXd& vectors,
                  const Rank1Perturbation& perturbation) {
  check_rank1_args(values, perturbation.rho,
                   Eigen::VectorXd::Zero(values.size()));  // sortedness + rho
  if (perturbation.kappa.size() != values.size())
    throw ArgumentError("rank1_update: kappa size mismatch");
  SlotUpdate upd = apply_rank1(values, vectors, perturbation.rho, perturbation.kappa);
  values = std::move(upd.values);
  vectors = std::move(upd.vectors);
  sort_ascending(values, vectors);
}

EigenSystem grow_eigensystem(const EigenSystem& sys, const Eigen::VectorXd& k_vec,
                             double k_self) {
  const Eigen::Index n = sys.size();
  if (k_vec.size() != n)
    throw ArgumentError("grow_eigensystem: kernel vector length must equal " +
                        std::to_string(n));
  if (!(k_self > 0.0))
    throw ArgumentError("grow_eigensystem: self-similarity must be positive");

  // Work in ascending order; expand with eigenpair (k_self/4, e_{n+1}).
  Eigen::VectorXd values(n + 1);
  Eigen::MatrixXd vectors = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    values[i] = sys.eigenvalues[n - 1 - i];
    vectors.col(i).head(n) = sys.eigenvectors.col(n - 1 - i);
  }
  values[n] = k_self / 4.0;
  vectors(n, n) = 1.0;
  sort_ascending(values, vectors);

  const double rho = 4.0 / k_self;
  Eigen::VectorXd kappa1(n + 1), kappa2(n + 1);
  kappa1.head(n) = k_vec;
  kappa1[n] = k_self / 2.0;
  kappa2.head(n) = k_vec;
  kappa2[n] = k_self / 4.0;

  SlotUpdate first = apply_rank1(values, vectors, rho, kappa1);
  sort_ascending(first.values, first.vectors);
  SlotUpdate second = apply_rank1(first.values, first.vectors, -rho, kappa2);
  sort_ascending(second.values, second.vectors);

  EigenSystem out;
  out.eigenvalues = second.values.reverse();
  out.eigenvectors = second.vectors.rowwise().reverse();
  apply_sign_convention(out.eigenvectors);
  return out;
}

void orthonormalize(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i)
      vectors.col(j) -= vectors.col(i).dot(vectors.col(j)) * vectors.col(i);
    const double norm = vectors.col(j).norm();
    if (norm == 0.0 || !std::isfinite(norm))
      throw NumericalError("orthonormalize: column " + std::to_string(j) +
                           " collapsed");
    vectors.col(j) /= norm;
  }
}

}  // namespace speed
