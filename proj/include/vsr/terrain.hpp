#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vsr {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
inline Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

enum class TerrainKind { kFlat, kHilly, kSteppy, kSlope };

// Piecewise-linear ground profile. Every terrain keeps a flat launch pad for
// x < 5 side lengths so runs start identically; beyond the generated range
// the profile continues at the last knot height.
class Terrain {
public:
  static Terrain flat();
  // Triangular hills: peak heights uniform in [h/2, h], peak spacings
  // uniform in [d/2, d], drawn from the seeded generator.
  static Terrain hilly(double max_height, double max_spacing,
                       std::uint64_t seed);
  // Staircase rising by step_height every step_width.
  static Terrain steppy(double step_height, double step_width);
  // Straight grade y = -tan(angle) * x beyond the pad; positive angle is
  // downhill toward +x. The pad sits at the grade's height at x = 5 so the
  // profile stays continuous. Angle in degrees, |angle| < 30.
  static Terrain slope(double angle_deg);

  double height_at(double x) const;
  // Unit surface normal (pointing away from the ground) of the segment
  // under x.
  Vec2 normal_at(double x) const;

  TerrainKind kind() const { return kind_; }
  const std::string& descriptor() const { return descriptor_; }
  const std::vector<Vec2>& knots() const { return knots_; }

  static constexpr double kPadLength = 5.0;

private:
  Terrain(TerrainKind kind, std::string descriptor, std::vector<Vec2> knots);
  std::size_t segment_index(double x) const;

  TerrainKind kind_ = TerrainKind::kFlat;
  std::string descriptor_;
  std::vector<Vec2> knots_;  // strictly increasing x
};

}  // namespace vsr
