#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace objnav {

/// Upper bound on the number of semantic categories a run may use.
inline constexpr std::size_t kMaxCategories = 16;

/// Tolerance on the unit-sum invariant of a distribution.
inline constexpr double kDistributionTolerance = 1e-6;

/// Clamp floor applied to both arguments of the KL divergence.
inline constexpr double kKlEpsilon = 1e-6;

/// Normalized probability distribution over a fixed set of M >= 2 categories.
class SemanticDist {
 public:
  SemanticDist() = default;

  /// Throws std::invalid_argument unless `probs` is a valid distribution.
  explicit SemanticDist(std::vector<double> probs);

  static SemanticDist uniform(std::size_t num_categories);
  static SemanticDist one_hot(std::size_t num_categories, std::size_t category);

  /// Elementwise-nonnegative, finite, sums to 1 within kDistributionTolerance, size in [2, kMaxCategories].
  static bool is_valid(std::span<const double> probs);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  std::size_t argmax() const;
  double max_prob() const;

  friend bool operator==(const SemanticDist&, const SemanticDist&) = default;

 private:
  std::vector<double> probs_;
};

/// Elementwise maximum followed by renormalization.
/// Throws std::invalid_argument on mismatched sizes.
SemanticDist max_fuse(const SemanticDist& a, const SemanticDist& b);

/// KL(p || q) after clamping both arguments to >= kKlEpsilon and renormalizing.
/// Never negative. Throws std::invalid_argument on mismatched sizes.
double kl_divergence(std::span<const double> p, std::span<const double> q);
double kl_divergence(const SemanticDist& p, const SemanticDist& q);

/// Index of the largest entry; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> v);

/// Discrete identification action s in {0, ..., 9}.
class ThresholdAction {
 public:
  static constexpr int kMin = 0;
  static constexpr int kMax = 9;

  constexpr ThresholdAction() = default;
  /// Throws std::out_of_range outside [kMin, kMax].
  explicit ThresholdAction(int s);

  constexpr int value() const { return s_; }
  friend constexpr bool operator==(ThresholdAction, ThresholdAction) = default;

 private:
  int s_ = 0;
};

/// Lower end of the identification threshold range.
inline constexpr double kThresholdLow = 0.5;

/// tau = tau_low + s * (1 - tau_low) / 10, evaluated so that each value is the
/// double nearest to its decimal (0.50, 0.55, ..., 0.95).
double threshold_of(ThresholdAction a);

}  // namespace objnav
