#include "jrc/genetic.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace jrc {

namespace {

struct Individual {
  RVector genes;
  double cost;
};

}  // namespace

GeneticResult minimize_phases(const PhaseCost& cost, int dim, const GeneticOptions& options, std::uint64_t seed,
                              std::span<const RVector> seeds) {
  require(dim >= 1, "genetic search: dimension must be positive");
  require(options.population >= 2, "genetic search: population must be at least 2");
  require(options.generations >= 0, "genetic search: negative generation count");
  require(options.elite >= 1 && options.elite < options.population, "genetic search: elite count out of range");
  for (const auto& s : seeds) require(s.size() == dim, "genetic search: seed vector has wrong dimension");

  std::mt19937_64 rng(mix_seed(seed));
  std::uniform_real_distribution<double> uniform_phase(0.0, kTwoPi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> perturb(0.0, options.mutation_sigma);
  const double mutation_rate =
      options.mutation_rate > 0.0 ? options.mutation_rate : std::max(1.0 / dim, 0.1);

  GeneticResult result;
  auto evaluate = [&](RVector genes) {
    const double c = cost(genes);
    ++result.evaluations;
    return Individual{std::move(genes), c};
  };

  std::vector<Individual> pop;
  pop.reserve(options.population);
  for (const auto& s : seeds) {
    if (static_cast<int>(pop.size()) == options.population) break;
    pop.push_back(evaluate(s.unaryExpr([](double p) { return wrap_phase(p); })));
  }
  while (static_cast<int>(pop.size()) < options.population) {
    RVector g(dim);
    for (int i = 0; i < dim; ++i) g(i) = uniform_phase(rng);
    pop.push_back(evaluate(std::move(g)));
  }

  auto by_cost = [](const Individual& a, const Individual& b) { return a.cost < b.cost; };
  std::stable_sort(pop.begin(), pop.end(), by_cost);
  result.history.push_back(pop.front().cost);

  std::uniform_int_distribution<int> pick(0, options.population - 1);
  auto tournament = [&]() -> const Individual& {
    int best = pick(rng);
    for (int t = 1; t < options.tournament; ++t) {
      const int c = pick(rng);
      if (pop[c].cost < pop[best].cost) best = c;
    }
    return pop[best];
  };

  for (int gen = 0; gen < options.generations; ++gen) {
    std::vector<Individual> next(pop.begin(), pop.begin() + options.elite);
    next.reserve(options.population);
    while (static_cast<int>(next.size()) < options.population) {
      const Individual& a = tournament();
      const Individual& b = tournament();
      RVector child = a.genes;
      if (unit(rng) < options.crossover_rate) {
        for (int i = 0; i < dim; ++i)
          if (unit(rng) < 0.5) child(i) = b.genes(i);
      }
      bool mutated = false;
      for (int i = 0; i < dim; ++i) {
        if (unit(rng) < mutation_rate) {
          child(i) = wrap_phase(child(i) + perturb(rng));
          mutated = true;
        }
      }
      if (!mutated) {
        const int i = std::uniform_int_distribution<int>(0, dim - 1)(rng);
        child(i) = wrap_phase(child(i) + perturb(rng));
      }
      next.push_back(evaluate(std::move(child)));
    }
    pop = std::move(next);
    std::stable_sort(pop.begin(), pop.end(), by_cost);
    result.history.push_back(pop.front().cost);
  }

  result.best = pop.front().genes;
  result.best_cost = pop.front().cost;
  return result;
}

}  // namespace jrc
