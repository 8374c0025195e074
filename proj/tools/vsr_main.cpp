#include <cstdint>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vsr/commands.hpp"
#include "vsr/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"2D voxel soft robot neuroevolution toolkit"};
  app.set_version_flag("--version", vsr::kToolkitVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string manifest_path;
  std::string terrain_id;
  std::string out_path;
  std::string glob_a;
  std::string glob_b;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<long long> evals;
  std::optional<std::string> out_dir;

  CLI::App* evolve = app.add_subcommand("evolve", "run one optimization");
  evolve->add_option("--config", config_path, "run config file")
      ->required()
      ->check(CLI::ExistingFile);
  evolve->add_option("--seed", seed, "override run seed");
  evolve->add_option("--workers", workers, "parallel fitness evaluations");
  evolve->add_option("--evals", evals, "override evaluation budget");
  evolve->add_option("--out", out_dir, "override output directory");

  CLI::App* reassess =
      app.add_subcommand("reassess", "score a run's champion on the 16-terrain suite");
  reassess->add_option("manifest", manifest_path, "manifest.json of a finished run")
      ->required()
      ->check(CLI::ExistingFile);
  reassess->add_option("--workers", workers, "parallel terrain evaluations");

  CLI::App* stats = app.add_subcommand(
      "stats", "Mann-Whitney U between two groups of run summaries");
  stats->add_option("group_a", glob_a, "glob of manifests or reassess CSVs")
      ->required();
  stats->add_option("group_b", glob_b, "glob of manifests or reassess CSVs")
      ->required();

  CLI::App* replay = app.add_subcommand(
      "replay", "re-simulate a champion and export the full trajectory");
  replay->add_option("manifest", manifest_path, "manifest.json of a finished run")
      ->required()
      ->check(CLI::ExistingFile);
  replay->add_option("terrain", terrain_id, "terrain id (flat or a suite id)")
      ->required();
  replay->add_option("out", out_path, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : vsr::kExitUsage;
  }

  vsr::CliOverrides overrides;
  overrides.seed = seed;
  overrides.workers = workers;
  overrides.evals = evals;
  overrides.out_dir = out_dir;

  if (evolve->parsed()) return vsr::cmd_evolve(config_path, overrides);
  if (reassess->parsed()) return vsr::cmd_reassess(manifest_path, overrides);
  if (stats->parsed()) return vsr::cmd_stats(glob_a, glob_b);
  if (replay->parsed()) return vsr::cmd_replay(manifest_path, terrain_id, out_path);
  return vsr::kExitUsage;
}
