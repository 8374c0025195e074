#include "vsr/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "vsr/errors.hpp"
#include "vsr/rng.hpp"

namespace vsr {
namespace {

constexpr double kExtent = 5000.0;  // generated profile length past the pad
constexpr double kRiserWidth = 0.02;
constexpr double kPi = 3.14159265358979323846;

std::string format_double(double v) {
  std::string s = std::to_string(v);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

Terrain::Terrain(TerrainKind kind, std::string descriptor,
                 std::vector<Vec2> knots)
    : kind_(kind), descriptor_(std::move(descriptor)), knots_(std::move(knots)) {}

Terrain Terrain::flat() {
  return Terrain(TerrainKind::kFlat, "flat",
                 {{-kExtent, 0.0}, {kExtent, 0.0}});
}

Terrain Terrain::hilly(double max_height, double max_spacing,
                       std::uint64_t seed) {
  if (!(max_height > 0.0) || !(max_spacing > 0.0)) {
    throw InvalidTerrain("hilly terrain needs positive height and spacing, got h=" +
                         std::to_string(max_height) +
                         " d=" + std::to_string(max_spacing));
  }
  std::vector<Vec2> knots;
  knots.push_back({-kExtent, 0.0});
  knots.push_back({kPadLength, 0.0});
  Rng rng(derive_seed(seed, 0x7e72ULL));
  double x = kPadLength;
  while (x < kPadLength + kExtent) {
    const double spacing = rng.uniform(0.5 * max_spacing, max_spacing);
    const double height = rng.uniform(0.5 * max_height, max_height);
    knots.push_back({x + 0.5 * spacing, height});
    knots.push_back({x + spacing, 0.0});
    x += spacing;
  }
  return Terrain(TerrainKind::kHilly,
                 "hilly h=" + format_double(max_height) +
                     " d=" + format_double(max_spacing),
                 std::move(knots));
}

Terrain Terrain::steppy(double step_height, double step_width) {
  if (!(step_height > 0.0) || !(step_width > kRiserWidth)) {
    throw InvalidTerrain("steppy terrain needs positive step height and width > " +
                         std::to_string(kRiserWidth) + ", got h=" +
                         std::to_string(step_height) +
                         " w=" + std::to_string(step_width));
  }
  std::vector<Vec2> knots;
  knots.push_back({-kExtent, 0.0});
  double x = kPadLength;
  double level = 0.0;
  while (x < kPadLength + kExtent) {
    knots.push_back({x, level});
    level += step_height;
    knots.push_back({x + kRiserWidth, level});
    x += step_width;
  }
  return Terrain(TerrainKind::kSteppy,
                 "steppy h=" + format_double(step_height) +
                     " w=" + format_double(step_width),
                 std::move(knots));
}

Terrain Terrain::slope(double angle_deg) {
  if (!(std::abs(angle_deg) < 30.0)) {
    throw InvalidTerrain("slope angle must satisfy |angle| < 30 degrees, got " +
                         std::to_string(angle_deg));
  }
  const double grade = -std::tan(angle_deg * kPi / 180.0);
  const double pad_y = grade * kPadLength;
  std::vector<Vec2> knots;
  knots.push_back({-kExtent, pad_y});
  knots.push_back({kPadLength, pad_y});
  knots.push_back({kPadLength + kExtent, grade * (kPadLength + kExtent)});
  return Terrain(TerrainKind::kSlope, "slope angle=" + format_double(angle_deg),
                 std::move(knots));
}

std::size_t Terrain::segment_index(double x) const {
  const auto it = std::upper_bound(
      knots_.begin(), knots_.end(), x,
      [](double value, const Vec2& knot) { return value < knot.x; });
  if (it == knots_.begin()) return 0;
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  return std::min(i, knots_.size() - 2);
}

double Terrain::height_at(double x) const {
  if (x <= knots_.front().x) return knots_.front().y;
  if (x >= knots_.back().x) return knots_.back().y;
  const std::size_t i = segment_index(x);
  const Vec2& a = knots_[i];
  const Vec2& b = knots_[i + 1];
  const double t = (x - a.x) / (b.x - a.x);
  return a.y + t * (b.y - a.y);
}

Vec2 Terrain::normal_at(double x) const {
  if (x <= knots_.front().x || x >= knots_.back().x) return {0.0, 1.0};
  const std::size_t i = segment_index(x);
  const Vec2 d = knots_[i + 1] - knots_[i];
  const double len = std::sqrt(dot(d, d));
  if (len <= 0.0) return {0.0, 1.0};
  return {-d.y / len, d.x / len};
}

}  // namespace vsr
