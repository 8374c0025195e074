#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vsr/config.hpp"

namespace vsr {

// Shortest decimal string that round-trips the double; locale-independent,
// '.' decimal point.
std::string format_double(double v);

std::string iso8601_utc_now();

// First lines of every output file: '#' comments carrying toolkit version
// and run seed, plus any extras ("key=value" strings, one per line).
std::string file_header(std::uint64_t seed,
                        const std::vector<std::string>& extras = {});

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);  // throws ConfigError

// One value per line, full precision, after the header comments.
void write_genotype(const std::string& path, std::uint64_t seed,
                    const std::vector<double>& genotype);
std::vector<double> read_genotype(const std::string& path);

struct ManifestData {
  RunConfig config;
  std::string started_at;
  std::string finished_at;
  double best_fitness = 0.0;
  long long evals = 0;
  long long non_finite = 0;
  std::string genotype_file = "best_genotype.txt";
  std::string history_file = "history.csv";
};

void write_manifest(const std::string& path, const ManifestData& data);
ManifestData read_manifest(const std::string& path);

}  // namespace vsr
