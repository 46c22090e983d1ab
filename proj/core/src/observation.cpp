#include "objnav/observation.hpp"

namespace objnav {

std::vector<float> Observation::encode_points() const {
  if (points.empty()) return {};
  const std::size_t m = points.front().sem.size();
  const std::size_t width = 3 + m + 1;
  std::vector<float> out;
  out.reserve(points.size() * width);
  for (const FusedPoint& p : points) {
    out.push_back(static_cast<float>(p.pos.x));
    out.push_back(static_cast<float>(p.pos.y));
    out.push_back(static_cast<float>(p.pos.z));
    for (double v : p.sem.probs()) out.push_back(static_cast<float>(v));
    out.push_back(p.consistency ? static_cast<float>(*p.consistency) : kAbsentConsistency);
  }
  return out;
}

}  // namespace objnav
