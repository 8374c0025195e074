#include "vsr/io.hpp"

#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "vsr/errors.hpp"
#include "vsr/version.hpp"

namespace vsr {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "0";
  return std::string(buf, ptr);
}

std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string file_header(std::uint64_t seed,
                        const std::vector<std::string>& extras) {
  std::string header = "# toolkit_version=";
  header += kToolkitVersion;
  header += "\n# seed=" + std::to_string(seed) + "\n";
  for (const std::string& extra : extras) {
    header += "# " + extra + "\n";
  }
  return header;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error("write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_genotype(const std::string& path, std::uint64_t seed,
                    const std::vector<double>& genotype) {
  std::string content = file_header(
      seed, {"length=" + std::to_string(genotype.size())});
  for (double g : genotype) {
    content += format_double(g);
    content += '\n';
  }
  write_text_file(path, content);
}

std::vector<double> read_genotype(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<double> genotype;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    double v = 0.0;
    const auto [ptr, ec] =
        std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc{} || ptr != line.data() + line.size()) {
      throw GenotypeShapeError("'" + path + "' line " +
                               std::to_string(line_no) +
                               " is not a number: '" + line + "'");
    }
    genotype.push_back(v);
  }
  return genotype;
}

void write_manifest(const std::string& path, const ManifestData& data) {
  nlohmann::json j;
  j["toolkit_version"] = kToolkitVersion;
  j["seed"] = data.config.seed;
  j["started_at"] = data.started_at;
  j["finished_at"] = data.finished_at;
  j["best_fitness"] = std::isfinite(data.best_fitness)
                          ? nlohmann::json(data.best_fitness)
                          : nlohmann::json(nullptr);
  j["evals"] = data.evals;
  j["non_finite"] = data.non_finite;
  j["genotype_file"] = data.genotype_file;
  j["history_file"] = data.history_file;
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [key, value] : keys_from_config(data.config)) {
    cfg[key] = value;
  }
  j["config"] = cfg;
  write_text_file(path, j.dump(2) + "\n");
}

ManifestData read_manifest(const std::string& path) {
  const std::string text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path, std::string("not valid JSON: ") + e.what());
  }
  ManifestData data;
  try {
    KeyValues keys;
    for (const auto& [key, value] : j.at("config").items()) {
      keys[key] = value.get<std::string>();
    }
    data.config = config_from_keys(keys);
    data.started_at = j.value("started_at", "");
    data.finished_at = j.value("finished_at", "");
    data.best_fitness = j.at("best_fitness").is_null()
                            ? -std::numeric_limits<double>::infinity()
                            : j.at("best_fitness").get<double>();
    data.evals = j.value("evals", 0LL);
    data.non_finite = j.value("non_finite", 0LL);
    data.genotype_file = j.value("genotype_file", "best_genotype.txt");
    data.history_file = j.value("history_file", "history.csv");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path, std::string("manifest field error: ") + e.what());
  }
  validate_config(data.config);
  return data;
}

}  // namespace vsr
