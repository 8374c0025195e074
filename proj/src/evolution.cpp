#include "vsr/evolution.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "vsr/errors.hpp"
#include "vsr/rng.hpp"

namespace vsr {
namespace {

constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

void check_params(int genotype_length, const EsParams& params) {
  if (genotype_length < 1) {
    throw ConfigError("genotype_length",
                      "must be positive, got " + std::to_string(genotype_length));
  }
  if (params.population_size < 4) {
    throw ConfigError("es.population_size",
                      "must be at least 4, got " +
                          std::to_string(params.population_size));
  }
  if (!(params.sigma > 0.0)) {
    throw ConfigError("es.sigma", "must be positive, got " +
                                      std::to_string(params.sigma));
  }
  if (params.max_evals < 1) {
    throw ConfigError("es.max_evals", "must be positive, got " +
                                          std::to_string(params.max_evals));
  }
  if (params.workers < 1) {
    throw ConfigError("es.workers", "must be positive, got " +
                                        std::to_string(params.workers));
  }
}

bool better(const Individual& a, const Individual& b) {
  if (a.fitness != b.fitness) return a.fitness > b.fitness;
  return a.eval_index < b.eval_index;
}

double median_fitness(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) return kMinusInf;
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Evaluates every individual whose eval_index is still -1, in slot order for
// the numbering and in any order across workers for the actual calls.
void evaluate_population(std::vector<Individual>& pop, const FitnessFn& fitness,
                         int workers, long long& eval_counter,
                         long long& non_finite) {
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (pop[i].eval_index < 0) todo.push_back(i);
  }

  auto run_one = [&](std::size_t slot) {
    Individual& ind = pop[slot];
    double value;
    try {
      value = fitness(ind.genotype);
    } catch (const Error&) {
      value = kMinusInf;
    }
    if (!std::isfinite(value)) {
      ind.fitness = kMinusInf;
      ind.diverged = true;
    } else {
      ind.fitness = value;
    }
  };

  const int n_threads = std::min<int>(workers, static_cast<int>(todo.size()));
  if (n_threads <= 1) {
    for (std::size_t slot : todo) run_one(slot);
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
          if (i >= todo.size()) return;
          try {
            run_one(todo[i]);
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

  for (std::size_t slot : todo) {
    pop[slot].eval_index = eval_counter++;
    if (pop[slot].diverged) ++non_finite;
  }
}

}  // namespace

std::vector<Individual> init_population(int genotype_length,
                                        const EsParams& params) {
  check_params(genotype_length, params);
  std::vector<Individual> pop(params.population_size);
  for (int i = 0; i < params.population_size; ++i) {
    Rng rng(derive_seed(params.seed, 0, static_cast<std::uint64_t>(i)));
    pop[i].genotype.resize(genotype_length);
    for (double& g : pop[i].genotype) g = rng.uniform(-1.0, 1.0);
  }
  return pop;
}

std::vector<Individual> next_generation(const std::vector<Individual>& pop,
                                        const EsParams& params, int generation,
                                        double sigma) {
  if (pop.empty()) throw ConfigError("es.population", "population is empty");
  std::vector<const Individual*> ranked;
  ranked.reserve(pop.size());
  for (const Individual& ind : pop) ranked.push_back(&ind);
  std::sort(ranked.begin(), ranked.end(),
            [](const Individual* a, const Individual* b) {
              return better(*a, *b);
            });

  const std::size_t n_parents =
      std::max<std::size_t>(1, static_cast<std::size_t>(params.population_size) / 4);
  const std::size_t usable = std::min(n_parents, ranked.size());
  const std::size_t length = ranked[0]->genotype.size();
  std::vector<double> mean(length, 0.0);
  for (std::size_t p = 0; p < usable; ++p) {
    for (std::size_t j = 0; j < length; ++j) {
      mean[j] += ranked[p]->genotype[j];
    }
  }
  for (double& m : mean) m /= static_cast<double>(usable);

  std::vector<Individual> next(params.population_size);
  next[0] = *ranked[0];
  for (int i = 1; i < params.population_size; ++i) {
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(generation),
                        static_cast<std::uint64_t>(i)));
    next[i].genotype.resize(length);
    for (std::size_t j = 0; j < length; ++j) {
      next[i].genotype[j] = mean[j] + rng.gaussian(0.0, sigma);
    }
  }
  return next;
}

EsResult run_es(int genotype_length, const FitnessFn& fitness,
                const EsParams& params, const ProgressFn& progress) {
  check_params(genotype_length, params);
  EsResult result;
  result.best_fitness = kMinusInf;

  std::vector<Individual> pop = init_population(genotype_length, params);
  long long eval_counter = 0;
  double sigma = params.sigma;

  for (int gen = 0;; ++gen) {
    const long long capacity = params.max_evals - result.evals;
    long long pending = 0;
    for (const Individual& ind : pop) pending += ind.eval_index < 0 ? 1 : 0;
    if (pending > capacity) {
      // Partial final generation: keep the elite plus as many children as
      // the budget still pays for.
      std::vector<Individual> trimmed;
      long long room = capacity;
      for (Individual& ind : pop) {
        if (ind.eval_index < 0) {
          if (room == 0) continue;
          --room;
        }
        trimmed.push_back(std::move(ind));
      }
      pop = std::move(trimmed);
    }
    evaluate_population(pop, fitness, params.workers, eval_counter,
                        result.non_finite);
    result.evals = eval_counter;

    const Individual* best = &pop[0];
    std::vector<double> fitnesses;
    fitnesses.reserve(pop.size());
    for (const Individual& ind : pop) {
      if (better(ind, *best)) best = &ind;
      fitnesses.push_back(ind.fitness);
    }
    if (best->fitness > result.best_fitness || result.best_genotype.empty()) {
      result.best_fitness = best->fitness;
      result.best_genotype = best->genotype;
    }

    GenerationStats stats;
    stats.generation = gen;
    stats.evals = result.evals;
    stats.best = best->fitness;
    stats.median = median_fitness(std::move(fitnesses));
    result.history.push_back(stats);
    if (progress) progress(stats);

    if (result.evals >= params.max_evals) break;
    pop = next_generation(pop, params, gen + 1, sigma);
    sigma *= params.sigma_decay;
  }
  return result;
}

}  // namespace vsr
