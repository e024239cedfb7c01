#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nfloc/rng.hpp"

namespace nfloc {

struct DEConvergence {
  double tol = 1e-10;  // minimum best-cost improvement considered progress
  int patience = 50;   // consecutive stalled generations before stopping
};

// Settings for the DE/rand/1/bin optimizer over a box-constrained domain.
struct DEConfig {
  int population_size = 50;
  int max_generations = 300;
  double weight = 0.5;         // mutation scaling factor F in [0, 2]
  double crossover = 0.8;      // crossover probability Cr in [0, 1]
  std::vector<std::pair<double, double>> bounds;
  std::uint64_t seed = 0;
  std::optional<DEConvergence> convergence;

  int dims() const { return static_cast<int>(bounds.size()); }
  void validate() const;
};

struct DERunResult {
  Eigen::VectorXd best_vector;
  double best_cost = 0.0;
  std::vector<double> trace;       // best-so-far cost after init and each generation
  std::vector<double> mean_trace;  // population mean cost alongside `trace`
  long evaluations = 0;
  int generations = 0;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

// Population rows uniform within the bounds; one row per individual.
Eigen::MatrixXd init_population(const DEConfig& config, Rng& rng);

// v = x_r1 + F (x_r2 - x_r3) with r1, r2, r3 distinct and != i, followed by
// reflection repair at the violated bounds.
Eigen::VectorXd mutate_rand1(const Eigen::MatrixXd& population, int i, double weight,
                             const std::vector<std::pair<double, double>>& bounds, Rng& rng);

// Binomial crossover: each component comes from the mutant with probability
// Cr, and one uniformly chosen component always does.
Eigen::VectorXd binomial_crossover(const Eigen::VectorXd& target, const Eigen::VectorXd& mutant,
                                   double crossover, Rng& rng);

// Greedy selection: the trial survives iff its cost is <= the target's.
// NaN costs count as +infinity.
bool select_trial(double target_cost, double trial_cost);

// Full DE/rand/1/bin loop. All random decisions for a generation are drawn
// serially from a per-generation substream before any evaluation, so the
// result depends only on (objective, config) and not on how evaluations are
// scheduled. The objective must be total over the box; +infinity marks
// infeasible points.
DERunResult run_de(const Objective& objective, const DEConfig& config);

}  // namespace nfloc
