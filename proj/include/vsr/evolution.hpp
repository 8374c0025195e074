#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace vsr {

// Simple elitist evolution strategy: parents are the fittest quarter, every
// child is the parents' element-wise mean plus gaussian noise, the best
// individual moves on unchanged and is not re-evaluated.
struct EsParams {
  int population_size = 36;
  double sigma = 0.35;
  double sigma_decay = 1.0;  // per-generation multiplier on sigma
  long long max_evals = 1000;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct Individual {
  std::vector<double> genotype;
  double fitness = 0.0;
  long long eval_index = -1;  // global evaluation order, -1 = not evaluated
  bool diverged = false;      // fitness came back non-finite
};

struct GenerationStats {
  int generation = 0;
  long long evals = 0;  // cumulative
  double best = 0.0;
  double median = 0.0;
};

struct EsResult {
  std::vector<double> best_genotype;
  double best_fitness = 0.0;
  std::vector<GenerationStats> history;
  long long evals = 0;
  long long non_finite = 0;
};

using FitnessFn = std::function<double(std::span<const double>)>;
using ProgressFn = std::function<void(const GenerationStats&)>;

// Generation 0: genotypes drawn uniformly from [-1, 1]. Each slot uses its
// own derived seed so results do not depend on evaluation order.
std::vector<Individual> init_population(int genotype_length,
                                        const EsParams& params);

// Breeds the next population from an evaluated one. Ranking is by fitness,
// ties broken by earlier eval_index; slot 0 carries the elite unchanged.
std::vector<Individual> next_generation(const std::vector<Individual>& pop,
                                        const EsParams& params, int generation,
                                        double sigma);

// Runs until max_evals fitness calls are spent; the last generation may be
// evaluated only partially. Throws ConfigError on bad parameters.
EsResult run_es(int genotype_length, const FitnessFn& fitness,
                const EsParams& params, const ProgressFn& progress = {});

}  // namespace vsr
