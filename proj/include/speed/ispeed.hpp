#pragma once

#include <Eigen/Core>
#include <vector>

#include "speed/rank1.hpp"
#include "speed/spectral.hpp"

namespace speed {

enum class TransferMode { Truncate, NearestNeighbor };

/// Admission rule: a sample joins the dictionary only when its squared
/// Euclidean distance to every dictionary point is at least the threshold.
struct NoveltyGate {
  double distance_threshold = 0.0;

  NoveltyGate() = default;
  explicit NoveltyGate(double d_th) : distance_threshold(d_th) {
    if (d_th < 0.0) throw ArgumentError("NoveltyGate: threshold must be >= 0");
  }
};

struct IncrementalOptions {
  TransferMode transfer_mode = TransferMode::Truncate;
  /// Re-orthonormalize the eigenvector matrix after this many grows
  /// (0 disables the pass).
  int reorthonormalize_every = 50;
  /// Admissions are buffered and applied as successive grows once this
  /// many have accumulated. 1 applies every admission immediately.
  int update_interval = 1;
};

/// Eigenmap-based filter representation that can absorb new dictionary
/// points without discarding the learned weights. The eigenmap is always
/// rebuildable bit-for-bit from (eigensystem, dictionary, m).
class SpeedState {
 public:
  SpeedState(Eigenmap map, EigenSystem sys, Eigen::VectorXd weights,
             IncrementalOptions options = {});

  const Eigenmap& map() const { return map_; }
  const EigenSystem& eigensystem() const { return sys_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::MatrixXd& dictionary() const { return map_.dictionary; }
  const std::vector<Eigen::VectorXd>& pending() const { return pending_; }
  Eigen::Index subspace_dim() const { return map_.subspace_dim(); }
  const IncrementalOptions& options() const { return options_; }

  void set_weights(Eigen::VectorXd w);

  /// Prediction with the current basis and weights.
  double predict(const Eigen::VectorXd& x) const;

 private:
  Eigenmap map_;
  EigenSystem sys_;
  Eigen::VectorXd weights_;
  IncrementalOptions options_;
  std::vector<Eigen::VectorXd> pending_;
  int grows_since_reorth_ = 0;

  friend SpeedState ispeed_step(const SpeedState&, const Eigen::VectorXd&);
  friend std::pair<SpeedState, bool> sispeed_step(const SpeedState&,
                                                  const NoveltyGate&,
                                                  const Eigen::VectorXd&);
};

/// Right inverse of the eigenmap: V_m Lambda_m^{1/2}; psi * right_inverse
/// is the m x m identity.
Eigen::MatrixXd right_inverse(const Eigenmap& map);

/// Kernel-vector representation of a weight vector, k_w = V_m Lambda_m^{1/2} w.
/// Applying psi to it recovers w.
Eigen::VectorXd weight_preimage(const Eigenmap& map, const Eigen::VectorXd& w);

/// Re-express weights learned under the old basis in a basis grown by one
/// dictionary point. Truncate drops the new point's preimage component
/// (equivalently pads with zero); NearestNeighbor substitutes the preimage
/// entry of the old point closest to the new one.
Eigen::VectorXd transfer_weights(const SpeedState& old_state, const Eigenmap& new_map,
                                 const Eigen::VectorXd& new_point);

/// Grow the eigensystem by one point, rebuild the top-m eigenmap, and
/// transfer the weights.
SpeedState ispeed_step(const SpeedState& state, const Eigen::VectorXd& new_point);

/// Novelty-gated step: returns the updated state and whether the point was
/// admitted. Non-admitted points leave the state untouched.
std::pair<SpeedState, bool> sispeed_step(const SpeedState& state,
                                         const NoveltyGate& gate,
                                         const Eigen::VectorXd& new_point);

/// Squared distance from x to the nearest column of points.
double min_squared_distance(const Eigen::MatrixXd& points, const Eigen::VectorXd& x);

/// Convenience constructor: batch decomposition of the dictionary Gram
/// matrix, zero weights.
SpeedState make_speed_state(const Eigen::MatrixXd& dictionary,
                            const KernelConfig& kernel, Eigen::Index m,
                            IncrementalOptions options = {});

}  // namespace speed
