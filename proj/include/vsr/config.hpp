#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "vsr/assessment.hpp"
#include "vsr/evolution.hpp"
#include "vsr/nca.hpp"
#include "vsr/physics.hpp"

namespace vsr {

// Flat key-value view of a config, keys spelled "section.key".
using KeyValues = std::map<std::string, std::string>;

// INI-style text: [section] headers, key = value lines, # and ; comments,
// blank lines ignored. Unknown keys are rejected later, not here.
KeyValues parse_ini(const std::string& text);

struct RunConfig {
  std::string morphology;  // rows of 0/1 joined by '-'
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::string preset = "custom";
  NcaConfig nca;
  EsParams es;
  LocomotionProtocol protocol;
  VoxelMaterial material;
  std::uint64_t suite_seed = 16;
  std::string suite_version = "16-v1";
};

// Accepts a body spec string directly or one of the named bodies worm,
// biped, comb.
std::string resolve_morphology(const std::string& name_or_spec);

// Builds a config from parsed keys; preset is applied before explicit nca
// overrides. Throws ConfigError naming the offending key.
RunConfig config_from_keys(const KeyValues& keys);

// Fully resolved snapshot, suitable for reproducing the run.
KeyValues keys_from_config(const RunConfig& config);

RunConfig load_run_config(const std::string& path);

// Cross-field checks: morphology parses, genotype length is computable,
// protocol and optimizer parameters are sane.
void validate_config(const RunConfig& config);

}  // namespace vsr
