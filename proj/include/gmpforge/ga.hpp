#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmpforge/cfg.hpp"
#include "gmpforge/gmp.hpp"
#include "gmpforge/rng.hpp"
#include "gmpforge/sut.hpp"

namespace gmpforge {

struct GaConfig {
    int population_size = 150;
    int generations = 100;
    int runs_per_case = 5;
    double reproduction_rate = 0.30;
    double mutation_rate = 0.40;
    double crossover_rate = 0.30;
    int training_budget = 5;
    int generalisation_budget = 10;
    int tournament_size = 4;
    int mutation_depth = 5;
    std::uint64_t master_seed = 42;
    GenerationParams generation;

    // Throws ConfigError when any size is non-positive, a rate is outside
    // [0, 1], or the rates do not sum to one.
    void validate() const;
};

// Population slots handed to each operator in one generation; crossover
// fills its share pairwise, with an odd final slot taking a single offspring.
struct BreedingPlan {
    int reproduction;
    int mutation;
    int crossover;
};

BreedingPlan breeding_plan(const GaConfig& config);

struct FitnessRecord {
    double fitness = 0.0;
    CoverageSet covered;
    int inconclusive_rounds = 0;
};

struct GenerationStats {
    int generation;
    double mean_fitness;
    double std_dev_fitness; // population form, over the individuals
    double best_fitness;
    int best_individual;
};

struct TrainResult {
    std::string sut_name;
    int run_index = 0;
    std::vector<GenerationStats> stats; // one row per evaluated generation
    std::vector<std::string> top_serialized; // best ten, best first
    std::vector<double> top_fitness;
};

// Runs the micro-program against the component for `budget` rounds from a
// fresh state, accumulating prime-path coverage across rounds. Fitness is
// the covered fraction of the component's prime paths. The micro-program may
// have more main trees than the component has parameters; the leading ones
// supply the inputs.
FitnessRecord evaluate_fitness(GmpIndividual& individual,
                               const SutDescriptor& sut, int budget,
                               std::uint64_t eval_seed);

// k draws with replacement; the winner is the highest fitness, ties going to
// the smaller population index.
std::size_t tournament_select(const std::vector<FitnessRecord>& records, int k,
                              Rng& rng);

std::vector<GmpIndividual> evolve_generation(
    const std::vector<GmpIndividual>& population,
    const std::vector<FitnessRecord>& records, const GaConfig& config,
    Rng& rng);

// One full evolutionary run of a component: returns the per-generation
// statistics and the serialized top ten of the final generation.
// Deterministic in (component, config, run_index).
TrainResult train(const SutDescriptor& sut, const GaConfig& config,
                  int run_index);

} // namespace gmpforge
