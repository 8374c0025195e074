#include "vsr/assessment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "vsr/errors.hpp"
#include "vsr/rng.hpp"

namespace vsr {
namespace {

constexpr double kMinusInf = -std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

std::string format_param(double v) {
  std::string s = std::to_string(v);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

double erfc_scaled(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

struct RankInfo {
  std::vector<double> ranks;  // midranks, pooled order follows input order
  bool has_ties = false;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
};

RankInfo midranks(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size() + b.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto value = [&](std::size_t i) {
    return i < a.size() ? a[i] : b[i - a.size()];
  };
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return value(x) < value(y); });

  RankInfo info;
  info.ranks.resize(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && value(order[j + 1]) == value(order[i])) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) info.ranks[order[k]] = rank;
    const double t = static_cast<double>(j - i + 1);
    if (t > 1.0) {
      info.has_ties = true;
      info.tie_term += t * t * t - t;
    }
    i = j + 1;
  }
  return info;
}

double u_of_first(std::span<const double> a, std::span<const double> b,
                  const RankInfo& info) {
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) rank_sum += info.ranks[i];
  const double na = static_cast<double>(a.size());
  (void)b;
  return rank_sum - na * (na + 1.0) / 2.0;
}

// Null distribution of U for tie-free samples of sizes (n, m): counts[u] is
// the number of rank arrangements with exactly u pairs a > b. Recurrence on
// the largest pooled value: from sample a it beats all m b's, from sample b
// it beats none, so N(u; k, l) = N(u-l; k-1, l) + N(u; k, l-1).
std::vector<double> exact_u_counts(std::size_t n, std::size_t m) {
  std::vector<std::vector<double>> prev(m + 1);
  std::vector<std::vector<double>> cur(m + 1);
  for (std::size_t l = 0; l <= m; ++l) prev[l] = {1.0};
  for (std::size_t k = 1; k <= n; ++k) {
    cur[0] = {1.0};
    for (std::size_t l = 1; l <= m; ++l) {
      std::vector<double>& out = cur[l];
      out.assign(k * l + 1, 0.0);
      const std::vector<double>& up = prev[l];
      const std::vector<double>& left = cur[l - 1];
      for (std::size_t u = 0; u < out.size(); ++u) {
        double c = 0.0;
        if (u >= l && u - l < up.size()) c += up[u - l];
        if (u < left.size()) c += left[u];
        out[u] = c;
      }
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace

int LocomotionProtocol::total_steps() const {
  return static_cast<int>(std::lround(duration * control_hz));
}

int LocomotionProtocol::transient_steps() const {
  return static_cast<int>(std::lround(transient * control_hz));
}

void LocomotionProtocol::validate() const {
  if (!(duration > 0.0) || !(control_hz > 0.0)) {
    throw InvalidProtocol("duration and control frequency must be positive");
  }
  if (!(transient >= 0.0) || !(transient < duration)) {
    throw InvalidProtocol("transient must lie in [0, duration), got transient=" +
                          std::to_string(transient) + " duration=" +
                          std::to_string(duration));
  }
}

EvaluationOutcome evaluate_locomotion(const MorphologyGrid& grid,
                                      const VoxelMaterial& material,
                                      NcaController& controller,
                                      const Terrain& terrain,
                                      const LocomotionProtocol& protocol,
                                      std::string terrain_id,
                                      bool record_nodes) {
  protocol.validate();
  if (controller.voxel_count() != grid.voxel_count()) {
    throw InvalidBody("controller drives " +
                      std::to_string(controller.voxel_count()) +
                      " voxels, body has " +
                      std::to_string(grid.voxel_count()));
  }
  controller.reset();

  EvaluationOutcome outcome;
  outcome.terrain_id = std::move(terrain_id);
  const int steps = protocol.total_steps();
  outcome.com_x.reserve(steps);
  outcome.com_y.reserve(steps);
  outcome.actuations.reserve(steps);

  BodyState state = build_body(grid, material, terrain);
  const double start_com_x = center_of_mass(state).x;
  std::vector<std::array<double, 4>> sensors(grid.voxel_count());
  const double dt = 1.0 / (protocol.control_hz * kSnnStepsPerControl);

  try {
    for (int k = 0; k < steps; ++k) {
      for (int v = 0; v < grid.voxel_count(); ++v) {
        sensors[v] = voxel_sensors(state, v, material);
      }
      std::vector<double> act = controller.control_step(sensors);
      for (int sub = 0; sub < kSnnStepsPerControl; ++sub) {
        advance(state, act, material, terrain, dt);
      }
      const Vec2 com = center_of_mass(state);
      outcome.com_x.push_back(com.x);
      outcome.com_y.push_back(com.y);
      outcome.actuations.push_back(std::move(act));
      if (record_nodes) outcome.nodes.push_back(state.pos);
    }
  } catch (const SimulationDiverged&) {
    outcome.vx = kMinusInf;
    outcome.diverged = true;
    return outcome;
  }

  const int t0 = protocol.transient_steps() - 1;
  const double start_x = t0 >= 0 ? outcome.com_x[t0] : start_com_x;
  outcome.vx = (outcome.com_x.back() - start_x) /
               (protocol.duration - protocol.transient);
  return outcome;
}

double locomotion_fitness(const MorphologyGrid& grid,
                          const VoxelMaterial& material,
                          const NcaConfig& config,
                          std::span<const double> genotype,
                          const Terrain& terrain,
                          const LocomotionProtocol& protocol) {
  NcaController controller(grid, config, genotype);
  return evaluate_locomotion(grid, material, controller, terrain, protocol)
      .vx;
}

TerrainSuite TerrainSuite::standard(std::uint64_t seed) {
  TerrainSuite suite;
  suite.version = "16-v1";
  int index = 0;
  for (double h : {0.5, 1.0, 2.0}) {
    for (double d : {5.0, 10.0}) {
      suite.entries.push_back(
          {"hilly-" + format_param(h) + "-" + format_param(d),
           Terrain::hilly(h, d, derive_seed(seed, 1,
                                            static_cast<std::uint64_t>(index)))});
      ++index;
    }
  }
  for (double h : {0.2, 0.5, 1.0}) {
    for (double w : {2.0, 4.0}) {
      suite.entries.push_back(
          {"steppy-" + format_param(h) + "-" + format_param(w),
           Terrain::steppy(h, w)});
    }
  }
  for (double angle : {5.0, 10.0}) {
    suite.entries.push_back(
        {"downhill" + format_param(angle), Terrain::slope(angle)});
  }
  for (double angle : {5.0, 10.0}) {
    suite.entries.push_back(
        {"uphill" + format_param(angle), Terrain::slope(-angle)});
  }
  return suite;
}

const TerrainSuiteEntry* TerrainSuite::find(const std::string& id) const {
  for (const TerrainSuiteEntry& entry : entries) {
    if (entry.id == id) return &entry;
  }
  return nullptr;
}

std::vector<std::string> TerrainSuite::ids() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const TerrainSuiteEntry& entry : entries) out.push_back(entry.id);
  return out;
}

ReassessReport reassess(const MorphologyGrid& grid,
                        const VoxelMaterial& material, const NcaConfig& config,
                        std::span<const double> genotype,
                        const TerrainSuite& suite,
                        const LocomotionProtocol& protocol, int workers) {
  protocol.validate();
  ReassessReport report;
  report.rows.resize(suite.entries.size());

  auto run_one = [&](std::size_t i) {
    const TerrainSuiteEntry& entry = suite.entries[i];
    NcaController controller(grid, config, genotype);
    EvaluationOutcome outcome = evaluate_locomotion(
        grid, material, controller, entry.terrain, protocol, entry.id);
    ReassessRow& row = report.rows[i];
    row.terrain_id = entry.id;
    const std::string& desc = entry.terrain.descriptor();
    const std::size_t space = desc.find(' ');
    row.kind = desc.substr(0, space);
    row.params = space == std::string::npos ? "" : desc.substr(space + 1);
    row.diverged = outcome.diverged;
    row.vx = outcome.diverged ? 0.0 : outcome.vx;
    if (!outcome.diverged) {
      const std::vector<double> trace = mean_actuation_trace(outcome, protocol);
      row.dominant_freq_hz = trace.size() >= 256
                                 ? vibration_metric(trace, protocol.control_hz)
                                 : 0.0;
    }
  };

  const int n_threads =
      std::clamp<int>(workers, 1, static_cast<int>(suite.entries.size()));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < suite.entries.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) {
      threads.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= report.rows.size()) return;
          try {
            run_one(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& th : threads) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  double sum = 0.0;
  for (const ReassessRow& row : report.rows) {
    sum += row.vx;
    report.any_diverged = report.any_diverged || row.diverged;
  }
  report.mean_vx = sum / static_cast<double>(report.rows.size());
  return report;
}

StatResult mann_whitney_u(std::span<const double> a,
                          std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw InvalidSample("both samples must be non-empty, got sizes " +
                        std::to_string(a.size()) + " and " +
                        std::to_string(b.size()));
  }
  const RankInfo info = midranks(a, b);
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n * m <= 200 && !info.has_ties) {
    const double u1 = u_of_first(a, b, info);
    const double u_min = std::min(u1, static_cast<double>(n * m) - u1);
    const std::vector<double> counts = exact_u_counts(n, m);
    double total = 0.0;
    double tail = 0.0;
    for (std::size_t u = 0; u < counts.size(); ++u) {
      total += counts[u];
      if (static_cast<double>(u) <= u_min) tail += counts[u];
    }
    StatResult result;
    result.u = u1;
    result.p = std::min(1.0, 2.0 * tail / total);
    result.n_a = n;
    result.n_b = m;
    result.exact = true;
    return result;
  }
  return mann_whitney_u_approx(a, b);
}

StatResult mann_whitney_u_approx(std::span<const double> a,
                                 std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw InvalidSample("both samples must be non-empty, got sizes " +
                        std::to_string(a.size()) + " and " +
                        std::to_string(b.size()));
  }
  const RankInfo info = midranks(a, b);
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  const double total = n + m;
  const double u1 = u_of_first(a, b, info);

  StatResult result;
  result.u = u1;
  result.n_a = a.size();
  result.n_b = b.size();
  result.exact = false;

  const double mean_u = n * m / 2.0;
  const double variance =
      n * m / 12.0 *
      ((total + 1.0) - info.tie_term / (total * (total - 1.0)));
  if (variance <= 0.0) {
    result.p = 1.0;
    return result;
  }
  const double numer = std::max(0.0, std::abs(u1 - mean_u) - 0.5);
  const double z = numer / std::sqrt(variance);
  result.p = std::min(1.0, 2.0 * erfc_scaled(z));
  return result;
}

double vibration_metric(std::span<const double> trace, double sample_hz) {
  if (trace.size() < 256) {
    throw InvalidSample("trace has " + std::to_string(trace.size()) +
                        " samples, need at least 256");
  }
  const std::size_t n = trace.size();
  double mean = 0.0;
  for (double v : trace) mean += v;
  mean /= static_cast<double>(n);

  double best_mag = 0.0;
  std::size_t best_k = 0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    double re = 0.0;
    double im = 0.0;
    const double w = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    for (std::size_t t = 0; t < n; ++t) {
      const double x = trace[t] - mean;
      re += x * std::cos(w * static_cast<double>(t));
      im -= x * std::sin(w * static_cast<double>(t));
    }
    const double mag = re * re + im * im;
    if (mag > best_mag) {
      best_mag = mag;
      best_k = k;
    }
  }
  if (best_k == 0 || best_mag < 1.0e-18 * static_cast<double>(n * n)) {
    return 0.0;
  }
  return static_cast<double>(best_k) * sample_hz / static_cast<double>(n);
}

std::vector<double> mean_actuation_trace(const EvaluationOutcome& outcome,
                                         const LocomotionProtocol& protocol) {
  std::vector<double> trace;
  const std::size_t start =
      static_cast<std::size_t>(std::max(0, protocol.transient_steps()));
  if (outcome.actuations.size() <= start) return trace;
  trace.reserve(outcome.actuations.size() - start);
  for (std::size_t k = start; k < outcome.actuations.size(); ++k) {
    const std::vector<double>& row = outcome.actuations[k];
    double mean = 0.0;
    for (double v : row) mean += v;
    trace.push_back(row.empty() ? 0.0 : mean / static_cast<double>(row.size()));
  }
  return trace;
}

}  // namespace vsr
