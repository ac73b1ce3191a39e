#include "gmpforge/ga.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gmpforge/error.hpp"
#include "gmpforge/gmp_text.hpp"

namespace gmpforge {

void GaConfig::validate() const {
    if (population_size <= 0) throw ConfigError("population size must be positive");
    if (generations < 0) throw ConfigError("generation count must be non-negative");
    if (runs_per_case <= 0) throw ConfigError("runs per case must be positive");
    if (training_budget <= 0 || generalisation_budget <= 0) {
        throw ConfigError("input budgets must be positive");
    }
    if (tournament_size <= 0) throw ConfigError("tournament size must be positive");
    if (mutation_depth <= 0) throw ConfigError("mutation depth must be positive");
    for (double rate : {reproduction_rate, mutation_rate, crossover_rate}) {
        if (rate < 0.0 || rate > 1.0) {
            throw ConfigError("operator rates must lie in [0, 1]");
        }
    }
    double sum = reproduction_rate + mutation_rate + crossover_rate;
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("operator rates must sum to one");
    }
    BreedingPlan plan = breeding_plan(*this);
    if (plan.crossover < 0) {
        throw ConfigError("operator rates round past the population size");
    }
    if (generation.terminal_chance < 0.0 || generation.terminal_chance > 1.0) {
        throw ConfigError("terminal chance must lie in [0, 1]");
    }
    if (generation.max_function_depth <= 0 || generation.max_main_depth <= 0) {
        throw ConfigError("depth bounds must be positive");
    }
}

BreedingPlan breeding_plan(const GaConfig& config) {
    int n = config.population_size;
    int reproduction = static_cast<int>(std::lround(config.reproduction_rate * n));
    int mutation = static_cast<int>(std::lround(config.mutation_rate * n));
    return {reproduction, mutation, n - reproduction - mutation};
}

FitnessRecord evaluate_fitness(GmpIndividual& individual,
                               const SutDescriptor& sut, int budget,
                               std::uint64_t eval_seed) {
    std::size_t arity = sut.signature.param_kinds.size();
    if (individual.mains.size() < arity) {
        throw ContractError("micro-program supplies " +
                            std::to_string(individual.mains.size()) +
                            " inputs but " + sut.name + " needs " +
                            std::to_string(arity));
    }
    for (std::size_t i = 0; i < arity; ++i) {
        if (individual.signature.param_kinds[i] != sut.signature.param_kinds[i]) {
            throw ContractError("micro-program input " + std::to_string(i) +
                                " kind differs from " + sut.name);
        }
    }

    reset_state(individual);
    FitnessRecord record;
    for (int round = 0; round < budget; ++round) {
        Rng rng = make_rng(eval_seed, {static_cast<std::uint64_t>(round)});
        ExecutionOutcome outcome = execute(individual, rng);
        if (!outcome.produced()) {
            ++record.inconclusive_rounds;
            continue;
        }
        std::span<const RuntimeValue> inputs(outcome.values->data(), arity);
        SutResponse response = invoke(sut, inputs);
        CoverageSet covered = coverage_of(response.trace, sut.graph);
        record.covered.covered.insert(covered.covered.begin(),
                                      covered.covered.end());
        update_state(individual, response.value, response.failed);
    }
    record.fitness = coverage_fraction(record.covered, sut.graph);
    return record;
}

std::size_t tournament_select(const std::vector<FitnessRecord>& records, int k,
                              Rng& rng) {
    std::size_t best = uniform_index(rng, records.size());
    for (int draw = 1; draw < k; ++draw) {
        std::size_t candidate = uniform_index(rng, records.size());
        if (records[candidate].fitness > records[best].fitness ||
            (records[candidate].fitness == records[best].fitness &&
             candidate < best)) {
            best = candidate;
        }
    }
    return best;
}

std::vector<GmpIndividual> evolve_generation(
    const std::vector<GmpIndividual>& population,
    const std::vector<FitnessRecord>& records, const GaConfig& config,
    Rng& rng) {
    BreedingPlan plan = breeding_plan(config);
    std::vector<GmpIndividual> next;
    next.reserve(population.size());

    for (int i = 0; i < plan.reproduction; ++i) {
        std::size_t parent = tournament_select(records, config.tournament_size, rng);
        next.push_back(population[parent].clone());
    }
    for (int i = 0; i < plan.mutation; ++i) {
        std::size_t parent = tournament_select(records, config.tournament_size, rng);
        GmpIndividual child = population[parent].clone();
        mutate(child, rng, config.mutation_depth, config.generation);
        next.push_back(std::move(child));
    }
    int remaining = plan.crossover;
    while (remaining > 0) {
        std::size_t first = tournament_select(records, config.tournament_size, rng);
        std::size_t second = tournament_select(records, config.tournament_size, rng);
        auto [child_a, child_b] =
            crossover(population[first], population[second], rng, config.generation);
        next.push_back(std::move(child_a));
        --remaining;
        if (remaining > 0) {
            next.push_back(std::move(child_b));
            --remaining;
        }
    }
    return next;
}

namespace {

GenerationStats compute_stats(int generation,
                              const std::vector<FitnessRecord>& records) {
    GenerationStats stats{};
    stats.generation = generation;
    double sum = 0.0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        sum += records[i].fitness;
        if (records[i].fitness > records[best].fitness) best = i;
    }
    double n = static_cast<double>(records.size());
    stats.mean_fitness = sum / n;
    double variance = 0.0;
    for (const FitnessRecord& r : records) {
        double d = r.fitness - stats.mean_fitness;
        variance += d * d;
    }
    stats.std_dev_fitness = std::sqrt(variance / n);
    stats.best_fitness = records[best].fitness;
    stats.best_individual = static_cast<int>(best);
    return stats;
}

} // namespace

TrainResult train(const SutDescriptor& sut, const GaConfig& config,
                  int run_index) {
    config.validate();
    std::uint64_t run = static_cast<std::uint64_t>(run_index);

    std::vector<GmpIndividual> population;
    population.reserve(config.population_size);
    for (int i = 0; i < config.population_size; ++i) {
        Rng rng = make_rng(config.master_seed,
                           {seed_tag_init, run, static_cast<std::uint64_t>(i)});
        population.push_back(
            generate_random(sut.signature, rng, config.generation));
    }

    TrainResult result;
    result.sut_name = sut.name;
    result.run_index = run_index;
    result.stats.reserve(config.generations + 1);

    std::vector<FitnessRecord> records(population.size());
    for (int gen = 0; gen <= config.generations; ++gen) {
        for (std::size_t i = 0; i < population.size(); ++i) {
            std::uint64_t eval_seed = derive_seed(
                config.master_seed, {seed_tag_eval, run,
                                     static_cast<std::uint64_t>(gen), i});
            records[i] =
                evaluate_fitness(population[i], sut, config.training_budget,
                                 eval_seed);
        }
        result.stats.push_back(compute_stats(gen, records));
        if (gen < config.generations) {
            Rng breed_rng = make_rng(config.master_seed,
                                     {seed_tag_breed, run,
                                      static_cast<std::uint64_t>(gen)});
            population = evolve_generation(population, records, config, breed_rng);
        }
    }

    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (records[a].fitness != records[b].fitness) {
            return records[a].fitness > records[b].fitness;
        }
        int na = total_node_count(population[a]);
        int nb = total_node_count(population[b]);
        if (na != nb) return na < nb;
        return a < b;
    });
    std::size_t keep = std::min<std::size_t>(10, order.size());
    for (std::size_t r = 0; r < keep; ++r) {
        result.top_serialized.push_back(serialize_gmp(population[order[r]]));
        result.top_fitness.push_back(records[order[r]].fitness);
    }
    return result;
}

} // namespace gmpforge
