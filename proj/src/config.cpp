#include "vsr/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>

#include "vsr/errors.hpp"
#include "vsr/morphology.hpp"

namespace vsr {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
  return out;
}

long long parse_int(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected an integer, got '" + value + "'");
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected an unsigned integer, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  std::string v = trim(value);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key, "expected a boolean, got '" + value + "'");
}

NeuralModel parse_model(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "mlp") return NeuralModel::kMlp;
  if (v == "lif") return NeuralModel::kLif;
  if (v == "lif_h") return NeuralModel::kLifHomeostasis;
  throw ConfigError(key, "expected mlp, lif, or lif_h, got '" + value + "'");
}

std::string model_name(NeuralModel model) {
  switch (model) {
    case NeuralModel::kMlp: return "mlp";
    case NeuralModel::kLif: return "lif";
    case NeuralModel::kLifHomeostasis: return "lif_h";
  }
  return "mlp";
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void apply_preset(const std::string& preset, NcaConfig& nca) {
  if (preset == "custom") return;
  if (preset == "ud") {
    nca = {true, true, 1, NeuralModel::kMlp};
  } else if (preset == "non-ud") {
    nca = {false, true, 1, NeuralModel::kMlp};
  } else if (preset == "und-snca") {
    nca = {true, false, 4, NeuralModel::kLifHomeostasis};
  } else {
    throw ConfigError("nca.preset",
                      "expected ud, non-ud, und-snca, or custom, got '" +
                          preset + "'");
  }
}

}  // namespace

KeyValues parse_ini(const std::string& text) {
  KeyValues keys;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no),
                          "unterminated section header '" + line + "'");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no),
                        "expected key = value, got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no), "empty key");
    }
    const std::string full = section.empty() ? key : section + "." + key;
    keys[full] = trim(line.substr(eq + 1));
  }
  return keys;
}

std::string resolve_morphology(const std::string& name_or_spec) {
  const std::string v = trim(name_or_spec);
  if (v == "worm") return "11111";
  if (v == "biped") return "1111-1111-1001";
  if (v == "comb") return "1111111-1010101";
  return v;
}

RunConfig config_from_keys(const KeyValues& keys) {
  RunConfig config;
  config.es.workers =
      static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  const auto preset_it = keys.find("nca.preset");
  config.preset = preset_it != keys.end() ? trim(preset_it->second) : "custom";
  apply_preset(config.preset, config.nca);

  for (const auto& [key, value] : keys) {
    if (key == "run.morphology") {
      config.morphology = resolve_morphology(value);
    } else if (key == "run.seed") {
      config.seed = parse_u64(key, value);
    } else if (key == "run.out") {
      config.out_dir = trim(value);
    } else if (key == "nca.preset") {
      // handled above
    } else if (key == "nca.uniform") {
      config.nca.uniform = parse_bool(key, value);
    } else if (key == "nca.directional") {
      config.nca.directional = parse_bool(key, value);
    } else if (key == "nca.channels") {
      config.nca.channels = static_cast<int>(parse_int(key, value));
    } else if (key == "nca.model") {
      config.nca.model = parse_model(key, value);
    } else if (key == "es.population") {
      config.es.population_size = static_cast<int>(parse_int(key, value));
    } else if (key == "es.sigma") {
      config.es.sigma = parse_double(key, value);
    } else if (key == "es.sigma_decay") {
      config.es.sigma_decay = parse_double(key, value);
    } else if (key == "es.evals") {
      config.es.max_evals = parse_int(key, value);
    } else if (key == "es.workers") {
      config.es.workers = static_cast<int>(parse_int(key, value));
    } else if (key == "protocol.duration") {
      config.protocol.duration = parse_double(key, value);
    } else if (key == "protocol.transient") {
      config.protocol.transient = parse_double(key, value);
    } else if (key == "protocol.control_hz") {
      config.protocol.control_hz = parse_double(key, value);
    } else if (key == "material.side_rest_length") {
      config.material.side_rest_length = parse_double(key, value);
    } else if (key == "material.mass_per_corner") {
      config.material.mass_per_corner = parse_double(key, value);
    } else if (key == "material.edge_stiffness") {
      config.material.edge_stiffness = parse_double(key, value);
    } else if (key == "material.diagonal_stiffness") {
      config.material.diagonal_stiffness = parse_double(key, value);
    } else if (key == "material.damping") {
      config.material.damping = parse_double(key, value);
    } else if (key == "material.actuation_ratio") {
      config.material.actuation_ratio = parse_double(key, value);
    } else if (key == "material.deformation_limit") {
      config.material.deformation_limit = parse_double(key, value);
    } else if (key == "material.gravity") {
      config.material.gravity = parse_double(key, value);
    } else if (key == "material.ground_stiffness") {
      config.material.ground_stiffness = parse_double(key, value);
    } else if (key == "material.ground_damping") {
      config.material.ground_damping = parse_double(key, value);
    } else if (key == "material.friction_static") {
      config.material.friction_static = parse_double(key, value);
    } else if (key == "material.friction_dynamic") {
      config.material.friction_dynamic = parse_double(key, value);
    } else if (key == "suite.seed") {
      config.suite_seed = parse_u64(key, value);
    } else if (key == "suite.version") {
      config.suite_version = trim(value);
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  config.es.seed = config.seed;
  return config;
}

KeyValues keys_from_config(const RunConfig& config) {
  KeyValues keys;
  keys["run.morphology"] = config.morphology;
  keys["run.seed"] = std::to_string(config.seed);
  keys["run.out"] = config.out_dir;
  keys["nca.preset"] = "custom";
  keys["nca.uniform"] = config.nca.uniform ? "true" : "false";
  keys["nca.directional"] = config.nca.directional ? "true" : "false";
  keys["nca.channels"] = std::to_string(config.nca.channels);
  keys["nca.model"] = model_name(config.nca.model);
  keys["es.population"] = std::to_string(config.es.population_size);
  keys["es.sigma"] = format_number(config.es.sigma);
  keys["es.sigma_decay"] = format_number(config.es.sigma_decay);
  keys["es.evals"] = std::to_string(config.es.max_evals);
  keys["es.workers"] = std::to_string(config.es.workers);
  keys["protocol.duration"] = format_number(config.protocol.duration);
  keys["protocol.transient"] = format_number(config.protocol.transient);
  keys["protocol.control_hz"] = format_number(config.protocol.control_hz);
  keys["material.side_rest_length"] =
      format_number(config.material.side_rest_length);
  keys["material.mass_per_corner"] =
      format_number(config.material.mass_per_corner);
  keys["material.edge_stiffness"] =
      format_number(config.material.edge_stiffness);
  keys["material.diagonal_stiffness"] =
      format_number(config.material.diagonal_stiffness);
  keys["material.damping"] = format_number(config.material.damping);
  keys["material.actuation_ratio"] =
      format_number(config.material.actuation_ratio);
  keys["material.deformation_limit"] =
      format_number(config.material.deformation_limit);
  keys["material.gravity"] = format_number(config.material.gravity);
  keys["material.ground_stiffness"] =
      format_number(config.material.ground_stiffness);
  keys["material.ground_damping"] =
      format_number(config.material.ground_damping);
  keys["material.friction_static"] =
      format_number(config.material.friction_static);
  keys["material.friction_dynamic"] =
      format_number(config.material.friction_dynamic);
  keys["suite.seed"] = std::to_string(config.suite_seed);
  keys["suite.version"] = config.suite_version;
  return keys;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  RunConfig config = config_from_keys(parse_ini(buffer.str()));
  validate_config(config);
  return config;
}

void validate_config(const RunConfig& config) {
  if (config.morphology.empty()) {
    throw ConfigError("run.morphology", "missing body spec");
  }
  MorphologyGrid grid = [&] {
    try {
      return parse_morphology(config.morphology);
    } catch (const Error& e) {
      throw ConfigError("run.morphology", e.what());
    }
  }();
  (void)genotype_length(config.nca, grid);
  config.protocol.validate();
  if (config.es.population_size < 4) {
    throw ConfigError("es.population", "must be at least 4, got " +
                                           std::to_string(
                                               config.es.population_size));
  }
  if (!(config.es.sigma > 0.0)) {
    throw ConfigError("es.sigma", "must be positive");
  }
  if (config.es.max_evals < 1) {
    throw ConfigError("es.evals", "must be positive");
  }
  if (config.es.workers < 1) {
    throw ConfigError("es.workers", "must be positive");
  }
  if (!(config.material.side_rest_length > 0.0) ||
      !(config.material.mass_per_corner > 0.0)) {
    throw ConfigError("material",
                      "side_rest_length and mass_per_corner must be positive");
  }
  if (!(config.material.deformation_limit > 0.0) ||
      config.material.deformation_limit >= 1.0) {
    throw ConfigError("material.deformation_limit", "must be in (0, 1)");
  }
  if (config.material.actuation_ratio < 0.0 ||
      config.material.actuation_ratio >= config.material.deformation_limit) {
    throw ConfigError("material.actuation_ratio",
                      "must be in [0, deformation_limit)");
  }
}

}  // namespace vsr
