#include "objnav/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace objnav {

SemanticDist::SemanticDist(std::vector<double> probs) : probs_(std::move(probs)) {
  if (!is_valid(probs_)) {
    throw std::invalid_argument("invalid semantic distribution of size " + std::to_string(probs_.size()));
  }
}

SemanticDist SemanticDist::uniform(std::size_t num_categories) {
  return SemanticDist(std::vector<double>(num_categories, 1.0 / static_cast<double>(num_categories)));
}

SemanticDist SemanticDist::one_hot(std::size_t num_categories, std::size_t category) {
  if (category >= num_categories) throw std::out_of_range("one_hot category out of range");
  std::vector<double> p(num_categories, 0.0);
  p[category] = 1.0;
  return SemanticDist(std::move(p));
}

bool SemanticDist::is_valid(std::span<const double> probs) {
  if (probs.size() < 2 || probs.size() > kMaxCategories) return false;
  double sum = 0.0;
  for (double v : probs) {
    if (!std::isfinite(v) || v < 0.0) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= kDistributionTolerance;
}

std::size_t SemanticDist::argmax() const { return objnav::argmax(probs_); }

double SemanticDist::max_prob() const { return probs_[argmax()]; }

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

SemanticDist max_fuse(const SemanticDist& a, const SemanticDist& b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_fuse: category count mismatch");
  std::vector<double> out(a.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = std::max(a[i], b[i]);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return SemanticDist(std::move(out));
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: category count mismatch");
  double p_sum = 0.0;
  double q_sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p_sum += std::max(p[i], kKlEpsilon);
    q_sum += std::max(q[i], kKlEpsilon);
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = std::max(p[i], kKlEpsilon) / p_sum;
    const double qi = std::max(q[i], kKlEpsilon) / q_sum;
    kl += pi * std::log(pi / qi);
  }
  return std::max(kl, 0.0);
}

double kl_divergence(const SemanticDist& p, const SemanticDist& q) { return kl_divergence(p.probs(), q.probs()); }

ThresholdAction::ThresholdAction(int s) : s_(s) {
  if (s < kMin || s > kMax) throw std::out_of_range("threshold action must lie in [0, 9]");
}

double threshold_of(ThresholdAction a) {
  // tau_low = 1/2, so tau = (10 + s) / 20 exactly; the division rounds once.
  return static_cast<double>(10 + a.value()) / 20.0;
}

}  // namespace objnav
