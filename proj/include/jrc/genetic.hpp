#ifndef JRC_GENETIC_HPP
#define JRC_GENETIC_HPP

#include "jrc/core.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace jrc {

/// Elitist real-coded genetic search over phase vectors in [0, 2pi)^dim.
struct GeneticOptions {
  int population = 50;
  int generations = 200;
  int elite = 2;
  int tournament = 3;
  double crossover_rate = 0.9;
  /// Per-gene mutation probability; a non-positive value selects max(1/dim, 0.1).
  double mutation_rate = 0.0;
  double mutation_sigma = 0.3;
};

struct GeneticResult {
  RVector best;
  double best_cost = 0.0;
  /// Best cost after each generation (index 0 is the initial population). Non-increasing.
  std::vector<double> history;
  long evaluations = 0;
};

using PhaseCost = std::function<double(const RVector&)>;

/// Minimises `cost`. Every vector in `seeds` joins the initial population, so with
/// elitism the result is never worse than the best seed.
GeneticResult minimize_phases(const PhaseCost& cost, int dim, const GeneticOptions& options, std::uint64_t seed,
                              std::span<const RVector> seeds = {});

}  // namespace jrc

#endif  // JRC_GENETIC_HPP
