#include "nfloc/de.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nfloc {

namespace {
constexpr std::uint64_t kInitTag = 0x696E6974;  // "init"
constexpr std::uint64_t kGenTag = 0x67656E73;   // "gens"

double reflect_into(double value, double lo, double hi) {
  // Reflection keeps repaired points in the interior instead of piling them
  // onto the box faces. F <= 2 bounds the overshoot, so this loop is short.
  for (int guard = 0; guard < 64 && (value < lo || value > hi); ++guard) {
    if (value < lo) value = 2.0 * lo - value;
    if (value > hi) value = 2.0 * hi - value;
  }
  if (value < lo || value > hi) value = 0.5 * (lo + hi);
  return value;
}
}  // namespace

void DEConfig::validate() const {
  if (population_size < 4) {
    throw std::invalid_argument("DE needs a population of at least 4");
  }
  if (max_generations < 0) throw std::invalid_argument("negative generation count");
  if (weight < 0.0 || weight > 2.0) throw std::invalid_argument("F must lie in [0, 2]");
  if (crossover < 0.0 || crossover > 1.0) throw std::invalid_argument("Cr must lie in [0, 1]");
  if (bounds.empty()) throw std::invalid_argument("no search bounds given");
  for (const auto& [lo, hi] : bounds) {
    if (!(lo < hi)) throw std::invalid_argument("each bound must satisfy low < high");
  }
}

Eigen::MatrixXd init_population(const DEConfig& config, Rng& rng) {
  config.validate();
  Eigen::MatrixXd population(config.population_size, config.dims());
  for (int i = 0; i < config.population_size; ++i) {
    for (int j = 0; j < config.dims(); ++j) {
      population(i, j) = rng.uniform(config.bounds[j].first, config.bounds[j].second);
    }
  }
  return population;
}

Eigen::VectorXd mutate_rand1(const Eigen::MatrixXd& population, int i, double weight,
                             const std::vector<std::pair<double, double>>& bounds, Rng& rng) {
  const int np = static_cast<int>(population.rows());
  if (np < 4) throw std::invalid_argument("mutation needs at least 4 individuals");
  int r1 = i, r2 = i, r3 = i;
  while (r1 == i) r1 = rng.uniform_int(np);
  while (r2 == i || r2 == r1) r2 = rng.uniform_int(np);
  while (r3 == i || r3 == r1 || r3 == r2) r3 = rng.uniform_int(np);

  Eigen::VectorXd mutant =
      population.row(r1) + weight * (population.row(r2) - population.row(r3));
  for (int j = 0; j < mutant.size(); ++j) {
    mutant(j) = reflect_into(mutant(j), bounds[j].first, bounds[j].second);
  }
  return mutant;
}

Eigen::VectorXd binomial_crossover(const Eigen::VectorXd& target, const Eigen::VectorXd& mutant,
                                   double crossover, Rng& rng) {
  if (target.size() != mutant.size()) throw std::invalid_argument("dimension mismatch");
  const int dims = static_cast<int>(target.size());
  const int forced = rng.uniform_int(dims);
  Eigen::VectorXd trial(dims);
  for (int j = 0; j < dims; ++j) {
    trial(j) = (rng.uniform() <= crossover || j == forced) ? mutant(j) : target(j);
  }
  return trial;
}

bool select_trial(double target_cost, double trial_cost) {
  if (std::isnan(trial_cost)) return false;
  if (std::isnan(target_cost)) return true;
  return trial_cost <= target_cost;
}

DERunResult run_de(const Objective& objective, const DEConfig& config) {
  config.validate();
  const int np = config.population_size;

  Rng init_rng(substream(config.seed, kInitTag));
  Eigen::MatrixXd population = init_population(config, init_rng);
  Eigen::VectorXd costs(np);

  DERunResult result;
  for (int i = 0; i < np; ++i) {
    costs(i) = objective(population.row(i).transpose());
    ++result.evaluations;
  }

  const auto record = [&] {
    int best_index = 0;
    costs.minCoeff(&best_index);
    result.trace.push_back(costs(best_index));
    result.mean_trace.push_back(costs.mean());
    result.best_vector = population.row(best_index).transpose();
    result.best_cost = costs(best_index);
  };
  record();

  int stalled = 0;
  for (int gen = 1; gen <= config.max_generations; ++gen) {
    Rng gen_rng(substream(config.seed, kGenTag, static_cast<std::uint64_t>(gen)));

    // All stochastic choices for the generation are made here, up front.
    std::vector<Eigen::VectorXd> trials(np);
    for (int i = 0; i < np; ++i) {
      const Eigen::VectorXd mutant =
          mutate_rand1(population, i, config.weight, config.bounds, gen_rng);
      trials[i] = binomial_crossover(population.row(i).transpose(), mutant, config.crossover,
                                     gen_rng);
    }

    for (int i = 0; i < np; ++i) {
      const double trial_cost = objective(trials[i]);
      ++result.evaluations;
      if (select_trial(costs(i), trial_cost)) {
        population.row(i) = trials[i].transpose();
        costs(i) = trial_cost;
      }
    }

    const double previous_best = result.best_cost;
    record();
    result.generations = gen;

    if (config.convergence) {
      const double improvement = previous_best - result.best_cost;
      stalled = improvement < config.convergence->tol ? stalled + 1 : 0;
      if (stalled >= config.convergence->patience) break;
    }
  }
  return result;
}

}  // namespace nfloc
