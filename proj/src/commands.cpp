#include "vsr/commands.hpp"

#include <glob.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "vsr/assessment.hpp"
#include "vsr/errors.hpp"
#include "vsr/io.hpp"
#include "vsr/version.hpp"

namespace vsr {
namespace {

namespace fs = std::filesystem;

template <typename Body>
int guarded(Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "error (ConfigError): " << e.what() << "\n";
    return kExitUsage;
  } catch (const MalformedSpec& e) {
    std::cerr << "error (MalformedSpec): " << e.what() << "\n";
    return kExitUsage;
  } catch (const GenotypeShapeError& e) {
    std::cerr << "error (GenotypeShapeError): " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidProtocol& e) {
    std::cerr << "error (InvalidProtocol): " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidTerrain& e) {
    std::cerr << "error (InvalidTerrain): " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidSample& e) {
    std::cerr << "error (InvalidSample): " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidBody& e) {
    std::cerr << "error (InvalidBody): " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

RunConfig load_config_with_overrides(const std::string& config_path,
                                     const CliOverrides& overrides) {
  RunConfig config = config_from_keys(parse_ini(read_text_file(config_path)));
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.workers) config.es.workers = *overrides.workers;
  if (overrides.evals) config.es.max_evals = *overrides.evals;
  if (overrides.out_dir) config.out_dir = *overrides.out_dir;
  config.es.seed = config.seed;
  validate_config(config);
  return config;
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<std::string> expand_glob(const std::string& pattern) {
  std::vector<std::string> paths;
  glob_t results{};
  const int rc = glob(pattern.c_str(), 0, nullptr, &results);
  if (rc == 0) {
    for (std::size_t i = 0; i < results.gl_pathc; ++i) {
      paths.emplace_back(results.gl_pathv[i]);
    }
  }
  globfree(&results);
  if (paths.empty() && fs::exists(pattern)) paths.push_back(pattern);
  return paths;
}

// A summary file is either a manifest (best_fitness) or a re-assessment CSV
// (adaptability recorded in the header comments).
double summary_value(const std::string& path) {
  const std::string text = read_text_file(path);
  if (!text.empty() && text.front() == '{') {
    try {
      const nlohmann::json j = nlohmann::json::parse(text);
      if (j.contains("best_fitness") && !j.at("best_fitness").is_null()) {
        return j.at("best_fitness").get<double>();
      }
    } catch (const nlohmann::json::exception&) {
    }
    throw ConfigError(path, "manifest has no usable best_fitness");
  }
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# adaptability=", 0) == 0) {
      return std::stod(line.substr(std::string("# adaptability=").size()));
    }
    if (!line.empty() && line.front() != '#') break;
  }
  throw ConfigError(path, "no adaptability header found in summary file");
}

}  // namespace

int cmd_evolve(const std::string& config_path, const CliOverrides& overrides) {
  return guarded([&] {
    const RunConfig config = load_config_with_overrides(config_path, overrides);
    const MorphologyGrid grid = parse_morphology(config.morphology);
    const Terrain terrain = Terrain::flat();
    const int length = genotype_length(config.nca, grid);

    const std::string started = iso8601_utc_now();
    const FitnessFn fitness = [&](std::span<const double> genotype) {
      return locomotion_fitness(grid, config.material, config.nca, genotype,
                                terrain, config.protocol);
    };
    const ProgressFn progress = [](const GenerationStats& stats) {
      std::cout << "gen=" << stats.generation << " evals=" << stats.evals
                << " best=" << format_double(stats.best)
                << " median=" << format_double(stats.median) << "\n";
    };
    const EsResult result = run_es(length, fitness, config.es, progress);

    fs::create_directories(config.out_dir);
    const fs::path out(config.out_dir);

    std::string history = file_header(
        config.seed, {"morphology=" + config.morphology,
                      "columns=generation,evals,best,median"});
    history += "generation,evals,best,median\n";
    for (const GenerationStats& stats : result.history) {
      history += std::to_string(stats.generation) + "," +
                 std::to_string(stats.evals) + "," +
                 format_double(stats.best) + "," +
                 format_double(stats.median) + "\n";
    }
    write_text_file((out / "history.csv").string(), history);
    write_genotype((out / "best_genotype.txt").string(), config.seed,
                   result.best_genotype);

    NcaController champion(grid, config.nca, result.best_genotype);
    const EvaluationOutcome outcome = evaluate_locomotion(
        grid, config.material, champion, terrain, config.protocol, "flat");
    std::string flat = file_header(
        config.seed,
        {"terrain=flat", "vx=" + format_double(outcome.vx),
         "columns=step,time_s,com_x,com_y,mean_actuation"});
    flat += "step,time_s,com_x,com_y,mean_actuation\n";
    for (std::size_t k = 0; k < outcome.com_x.size(); ++k) {
      double mean_act = 0.0;
      for (double a : outcome.actuations[k]) mean_act += a;
      if (!outcome.actuations[k].empty()) {
        mean_act /= static_cast<double>(outcome.actuations[k].size());
      }
      flat += std::to_string(k) + "," +
              format_double((static_cast<double>(k) + 1.0) /
                            config.protocol.control_hz) +
              "," + format_double(outcome.com_x[k]) + "," +
              format_double(outcome.com_y[k]) + "," +
              format_double(mean_act) + "\n";
    }
    write_text_file((out / "flat_outcome.csv").string(), flat);

    ManifestData manifest;
    manifest.config = config;
    manifest.started_at = started;
    manifest.finished_at = iso8601_utc_now();
    manifest.best_fitness = result.best_fitness;
    manifest.evals = result.evals;
    manifest.non_finite = result.non_finite;
    write_manifest((out / "manifest.json").string(), manifest);

    std::cout << "best=" << format_double(result.best_fitness)
              << " evals=" << result.evals << " out=" << config.out_dir
              << "\n";
    return kExitOk;
  });
}

int cmd_reassess(const std::string& manifest_path,
                 const CliOverrides& overrides) {
  return guarded([&] {
    ManifestData manifest = read_manifest(manifest_path);
    if (overrides.workers) manifest.config.es.workers = *overrides.workers;
    const fs::path dir = fs::path(manifest_path).parent_path();
    const std::vector<double> genotype =
        read_genotype((dir / manifest.genotype_file).string());

    const MorphologyGrid grid = parse_morphology(manifest.config.morphology);
    const TerrainSuite suite = TerrainSuite::standard(manifest.config.suite_seed);
    const ReassessReport report =
        reassess(grid, manifest.config.material, manifest.config.nca, genotype,
                 suite, manifest.config.protocol, manifest.config.es.workers);

    std::string csv = file_header(
        manifest.config.seed,
        {"suite=" + suite.version,
         "adaptability=" + format_double(report.mean_vx),
         "columns=terrain_id,kind,params,vx,diverged,dominant_freq_hz"});
    csv += "terrain_id,kind,params,vx,diverged,dominant_freq_hz\n";
    for (const ReassessRow& row : report.rows) {
      csv += row.terrain_id + "," + row.kind + "," +
             row.params + "," + format_double(row.vx) + "," +
             (row.diverged ? "1" : "0") + "," +
             format_double(row.dominant_freq_hz) + "\n";
    }
    const std::string out_path = (dir / "reassess.csv").string();
    write_text_file(out_path, csv);

    for (const ReassessRow& row : report.rows) {
      std::cout << row.terrain_id << " vx=" << format_double(row.vx)
                << (row.diverged ? " diverged" : "") << "\n";
    }
    std::cout << "adaptability=" << format_double(report.mean_vx)
              << " out=" << out_path << "\n";
    return kExitOk;
  });
}

int cmd_stats(const std::string& glob_a, const std::string& glob_b) {
  return guarded([&] {
    const std::vector<std::string> files_a = expand_glob(glob_a);
    const std::vector<std::string> files_b = expand_glob(glob_b);
    if (files_a.empty() || files_b.empty()) {
      std::cerr << "error: empty group (a matched "
                << files_a.size() << " files, b matched " << files_b.size()
                << ")\n";
      return kExitUsage;
    }
    std::vector<double> a;
    std::vector<double> b;
    for (const std::string& path : files_a) a.push_back(summary_value(path));
    for (const std::string& path : files_b) b.push_back(summary_value(path));

    const StatResult stat = mann_whitney_u(a, b);
    std::cout << "group_a: n=" << a.size()
              << " median=" << format_double(median_of(a)) << "\n";
    std::cout << "group_b: n=" << b.size()
              << " median=" << format_double(median_of(b)) << "\n";
    std::cout << "U=" << format_double(stat.u) << " method="
              << (stat.exact ? "exact" : "normal-approximation") << "\n";
    std::cout << "p=" << format_double(stat.p) << "\n";
    return kExitOk;
  });
}

int cmd_replay(const std::string& manifest_path, const std::string& terrain_id,
               const std::string& out_path) {
  return guarded([&] {
    const ManifestData manifest = read_manifest(manifest_path);
    const fs::path dir = fs::path(manifest_path).parent_path();
    const std::vector<double> genotype =
        read_genotype((dir / manifest.genotype_file).string());
    const MorphologyGrid grid = parse_morphology(manifest.config.morphology);
    const TerrainSuite suite = TerrainSuite::standard(manifest.config.suite_seed);

    const Terrain* terrain = nullptr;
    Terrain flat = Terrain::flat();
    if (terrain_id == "flat") {
      terrain = &flat;
    } else if (const TerrainSuiteEntry* entry = suite.find(terrain_id)) {
      terrain = &entry->terrain;
    } else {
      std::string ids = "flat";
      for (const std::string& id : suite.ids()) ids += ", " + id;
      std::cerr << "error: unknown terrain '" << terrain_id
                << "', valid ids: " << ids << "\n";
      return kExitUsage;
    }

    NcaController controller(grid, manifest.config.nca, genotype);
    const EvaluationOutcome outcome =
        evaluate_locomotion(grid, manifest.config.material, controller,
                            *terrain, manifest.config.protocol, terrain_id,
                            true);

    std::string csv = file_header(
        manifest.config.seed,
        {"terrain=" + terrain_id, "vx=" + format_double(outcome.vx),
         std::string("diverged=") + (outcome.diverged ? "1" : "0")});
    csv += "terrain_id,step,time_s,com_x,com_y,mean_actuation";
    const std::size_t n_nodes =
        outcome.nodes.empty() ? 0 : outcome.nodes.front().size();
    for (std::size_t i = 0; i < n_nodes; ++i) {
      const std::string n = std::to_string(i);
      csv += ",node" + n + "_x,node" + n + "_y";
    }
    csv += "\n";
    for (std::size_t k = 0; k < outcome.com_x.size(); ++k) {
      double mean_act = 0.0;
      for (double a : outcome.actuations[k]) mean_act += a;
      if (!outcome.actuations[k].empty()) {
        mean_act /= static_cast<double>(outcome.actuations[k].size());
      }
      csv += terrain_id + "," + std::to_string(k) + "," +
             format_double((static_cast<double>(k) + 1.0) /
                           manifest.config.protocol.control_hz) +
             "," + format_double(outcome.com_x[k]) + "," +
             format_double(outcome.com_y[k]) + "," + format_double(mean_act);
      for (const Vec2& p : outcome.nodes[k]) {
        csv += "," + format_double(p.x) + "," + format_double(p.y);
      }
      csv += "\n";
    }
    if (const fs::path parent = fs::path(out_path).parent_path();
        !parent.empty()) {
      fs::create_directories(parent);
    }
    write_text_file(out_path, csv);
    std::cout << "terrain=" << terrain_id << " vx=" << format_double(outcome.vx)
              << " out=" << out_path << "\n";
    return kExitOk;
  });
}

}  // namespace vsr
