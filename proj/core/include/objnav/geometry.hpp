#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace objnav {

/// World-frame point in meters, z up.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

inline Point3 operator+(const Point3& a, const Point3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Point3 operator-(const Point3& a, const Point3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Point3 operator*(const Point3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
inline Point3 operator*(double s, const Point3& a) { return a * s; }

inline double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Point3& a) { return std::sqrt(dot(a, a)); }

inline double distance(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline bool is_finite(const Point3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

/// Planar agent pose. Heading is measured counter-clockwise from +x, in radians.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  friend bool operator==(const Pose2&, const Pose2&) = default;
};

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  a = std::fmod(a, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

inline double deg_to_rad(double d) { return d * std::numbers::pi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }

inline double planar_distance(const Pose2& a, const Pose2& b) { return std::hypot(a.x - b.x, a.y - b.y); }
inline double planar_distance(const Pose2& a, const Point3& b) { return std::hypot(a.x - b.x, a.y - b.y); }

enum class Action : std::uint8_t { MoveForward, TurnLeft, TurnRight, Stop };

inline std::string_view to_string(Action a) {
  switch (a) {
    case Action::MoveForward: return "move_forward";
    case Action::TurnLeft: return "turn_left";
    case Action::TurnRight: return "turn_right";
    case Action::Stop: return "stop";
  }
  return "unknown";
}

}  // namespace objnav
