#include "gmpforge/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "gmpforge/error.hpp"
#include "gmpforge/gmp_text.hpp"

namespace gmpforge {

namespace fs = std::filesystem;

namespace {

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
        throw ArtifactError("cannot create " + path.parent_path().string() +
                            ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ArtifactError("cannot write " + path.string());
    out << content;
    if (!out.flush()) throw ArtifactError("short write to " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArtifactError("missing artifact " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw ArtifactError("unreadable artifact " + path.string());
    return buffer.str();
}

fs::path run_dir(const std::string& output_dir, const SutDescriptor& sut,
                 int run) {
    return fs::path(output_dir) / "training" / sut_slug(sut.name) /
           ("run-" + std::to_string(run));
}

void write_train_result(const std::string& output_dir, const SutDescriptor& sut,
                        const TrainResult& result) {
    fs::path dir = run_dir(output_dir, sut, result.run_index);
    std::string stats = "generation,mean_fitness,std_dev,best_fitness\n";
    for (const GenerationStats& row : result.stats) {
        stats += std::to_string(row.generation) + "," + fmt6(row.mean_fitness) +
                 "," + fmt6(row.std_dev_fitness) + "," +
                 fmt6(row.best_fitness) + "\n";
    }
    write_file(dir / "stats.csv", stats);
    std::string top_fitness = "rank,fitness\n";
    for (std::size_t r = 0; r < result.top_serialized.size(); ++r) {
        write_file(dir / "top10" / (std::to_string(r + 1) + ".gmp"),
                   result.top_serialized[r] + "\n");
        top_fitness += std::to_string(r + 1) + "," + fmt6(result.top_fitness[r]) + "\n";
    }
    write_file(dir / "top10" / "fitness.csv", top_fitness);
}

// Runs fn(0..job_count-1) over the requested number of threads. The first
// exception wins and is rethrown after all workers drain.
void parallel_for(int job_count, int threads,
                  const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, job_count));
    if (threads == 1) {
        for (int i = 0; i < job_count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        while (true) {
            int job = next.fetch_add(1);
            if (job >= job_count) return;
            try {
                fn(job);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

double mean_of(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double std_dev_of(const std::vector<double>& values, double mean) {
    double variance = 0.0;
    for (double v : values) variance += (v - mean) * (v - mean);
    return std::sqrt(variance / static_cast<double>(values.size()));
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    std::size_t lo = static_cast<std::size_t>(h);
    double frac = h - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

} // namespace

const std::vector<GeneralisationCase>& generalisation_cases() {
    static const std::vector<GeneralisationCase> cases = {
        {"And", {"AndOr", "Or", "TrueOrFalse", "True", "Xor"}},
        {"TrueOrFalse", {"True"}},
        {"Or", {"AndOr", "And", "TrueOrFalse", "True", "Xor"}},
        {"True", {"True"}},
        {"Euclidean - Iterative",
         {"Fibonacci - Iterative", "Euclidean - Recursive",
          "BinomialCoefficient"}},
        {"Euclidean - Recursive",
         {"Fibonacci - Recursive", "Fibonacci - Iterative",
          "Euclidean - Iterative", "BinomialCoefficient"}},
        {"Fibonacci - Iterative", {"Fibonacci - Recursive"}},
        {"Fibonacci - Recursive", {"Fibonacci - Iterative"}},
        {"Palindrome - Iterative", {"Palindrome - Recursive"}},
        {"Palindrome - Recursive", {"Palindrome - Iterative"}},
        {"BinomialCoefficient",
         {"Fibonacci - Iterative", "Fibonacci - Recursive",
          "Euclidean - Iterative", "Euclidean - Recursive"}},
        {"AndOr", {"Xor", "True", "TrueOrFalse", "And", "Or"}},
        {"Xor", {"True", "TrueOrFalse", "And", "Or", "AndOr"}},
        {"Substring", {"Vowels", "Anagram - Iterative", "Anagram - Recursive"}},
        {"Anagram - Iterative", {"Vowels", "Substring", "Anagram - Recursive"}},
        {"Anagram - Recursive", {"Vowels", "Substring", "Anagram - Iterative"}},
        {"Remainder",
         {"Fibonacci - Iterative", "Fibonacci - Recursive",
          "Euclidean - Iterative", "Euclidean - Recursive",
          "BinomialCoefficient"}},
        {"Vowels", {"Substring", "Anagram - Iterative", "Anagram - Recursive"}},
    };
    return cases;
}

BoxStats summarize(std::vector<double> values) {
    if (values.empty()) throw ContractError("cannot summarize an empty sample");
    BoxStats stats{};
    stats.mean = mean_of(values);
    stats.std_dev = std_dev_of(values, stats.mean);
    std::sort(values.begin(), values.end());
    stats.min = values.front();
    stats.q1 = quantile_sorted(values, 0.25);
    stats.median = quantile_sorted(values, 0.50);
    stats.q3 = quantile_sorted(values, 0.75);
    stats.max = values.back();
    return stats;
}

std::string prime_path_group(const SutDescriptor& sut) {
    std::size_t count = sut.graph.prime_paths().size();
    if (count <= 2) return "2";
    if (count == 3) return "3";
    return "4-5";
}

SuiteResults train_components(const StudyConfig& config,
                              const std::vector<const SutDescriptor*>& suts) {
    config.ga.validate();
    int runs = config.ga.runs_per_case;
    SuiteResults results(suts.size());
    for (auto& r : results) r.resize(runs);

    int job_count = static_cast<int>(suts.size()) * runs;
    parallel_for(job_count, config.jobs, [&](int job) {
        int sut_index = job / runs;
        int run = job % runs;
        TrainResult result = train(*suts[sut_index], config.ga, run);
        write_train_result(config.output_dir, *suts[sut_index], result);
        results[sut_index][run] = std::move(result);
    });
    return results;
}

std::vector<TrainResult> load_train_results(const std::string& output_dir,
                                            const SutDescriptor& sut,
                                            int runs) {
    std::vector<TrainResult> results;
    results.reserve(runs);
    for (int run = 0; run < runs; ++run) {
        TrainResult result;
        result.sut_name = sut.name;
        result.run_index = run;
        fs::path top = run_dir(output_dir, sut, run) / "top10";
        for (int rank = 1; rank <= 10; ++rank) {
            std::string text = read_file(top / (std::to_string(rank) + ".gmp"));
            while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
                text.pop_back();
            }
            try {
                parse_gmp(text); // integrity check before accepting the file
            } catch (const ParseError& e) {
                throw ArtifactError("corrupt artifact " +
                                    (top / (std::to_string(rank) + ".gmp")).string() +
                                    ": " + e.what());
            }
            result.top_serialized.push_back(std::move(text));
        }
        results.push_back(std::move(result));
    }
    return results;
}

std::vector<GeneralisationRow> run_generalisation_case(
    const GeneralisationCase& c, const std::vector<TrainResult>& runs,
    const GaConfig& config) {
    const SutDescriptor* training = find_sut(c.training);
    if (training == nullptr) {
        throw ConfigError("unknown training component " + c.training);
    }
    std::uint64_t training_index = registry_index(*training);

    std::vector<GmpIndividual> population;
    for (const TrainResult& run : runs) {
        for (const std::string& text : run.top_serialized) {
            population.push_back(parse_gmp(text));
        }
    }
    if (population.empty()) {
        throw ArtifactError("no trained micro-programs for " + c.training);
    }
    std::size_t per_run = runs.empty() ? 0 : runs.front().top_serialized.size();

    std::vector<GeneralisationRow> rows;
    rows.reserve(c.tests.size());
    for (const std::string& test_name : c.tests) {
        const SutDescriptor* test = find_sut(test_name);
        if (test == nullptr) {
            throw ConfigError("unknown test component " + test_name);
        }
        std::uint64_t test_index = registry_index(*test);

        GeneralisationRow row;
        row.training = training->name;
        row.test = test->name;
        row.fitness.reserve(population.size());
        for (std::size_t j = 0; j < population.size(); ++j) {
            std::uint64_t seed = derive_seed(
                config.master_seed,
                {seed_tag_generalise, training_index, test_index, j});
            FitnessRecord record = evaluate_fitness(
                population[j], *test, config.generalisation_budget, seed);
            row.fitness.push_back(record.fitness);
        }
        row.stats = summarize(row.fitness);
        if (per_run > 0) {
            for (std::size_t start = 0; start + per_run <= row.fitness.size();
                 start += per_run) {
                std::vector<double> slice(row.fitness.begin() + start,
                                          row.fitness.begin() + start + per_run);
                row.run_means.push_back(mean_of(slice));
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_generalisation_csvs(const std::string& output_dir,
                               const std::string& box_name,
                               const std::string& run_means_name,
                               const std::vector<GeneralisationRow>& rows) {
    std::string box =
        "training_object,test_object,mean,std_dev,min,q1,median,q3,max\n";
    std::string means = "training_object,test_object,run,mean_fitness\n";
    for (const GeneralisationRow& row : rows) {
        box += row.training + "," + row.test + "," + fmt6(row.stats.mean) + "," +
               fmt6(row.stats.std_dev) + "," + fmt6(row.stats.min) + "," +
               fmt6(row.stats.q1) + "," + fmt6(row.stats.median) + "," +
               fmt6(row.stats.q3) + "," + fmt6(row.stats.max) + "\n";
        for (std::size_t run = 0; run < row.run_means.size(); ++run) {
            means += row.training + "," + row.test + "," + std::to_string(run) +
                     "," + fmt6(row.run_means[run]) + "\n";
        }
    }
    fs::path dir = fs::path(output_dir) / "generalisation";
    write_file(dir / box_name, box);
    write_file(dir / run_means_name, means);
}

void run_full_study(const StudyConfig& config) {
    const auto& registry_list = registry();
    std::vector<const SutDescriptor*> suts;
    suts.reserve(registry_list.size());
    for (const SutDescriptor& sut : registry_list) suts.push_back(&sut);

    SuiteResults results = train_components(config, suts);

    // Aggregate fitness curves: per component and generation, the mean and
    // spread across runs of the generation's mean fitness.
    int generations = config.ga.generations;
    std::string curves =
        "sut,prime_path_group,generation,mean_over_runs,stddev_over_runs\n";
    std::vector<std::vector<double>> spread_by_sut(suts.size());
    for (std::size_t s = 0; s < suts.size(); ++s) {
        spread_by_sut[s].resize(generations + 1);
        for (int gen = 0; gen <= generations; ++gen) {
            std::vector<double> run_values;
            run_values.reserve(results[s].size());
            for (const TrainResult& run : results[s]) {
                run_values.push_back(run.stats[gen].mean_fitness);
            }
            double mean = mean_of(run_values);
            double spread = std_dev_of(run_values, mean);
            spread_by_sut[s][gen] = spread;
            curves += suts[s]->name + "," + prime_path_group(*suts[s]) + "," +
                      std::to_string(gen) + "," + fmt6(mean) + "," +
                      fmt6(spread) + "\n";
        }
    }
    write_file(fs::path(config.output_dir) / "training_curves.csv", curves);

    std::string spread_table = "prime_path_group,generation,mean_std_dev\n";
    const std::string groups[] = {"2", "3", "4-5"};
    for (const std::string& group : groups) {
        for (int gen = 0; gen <= generations; ++gen) {
            std::vector<double> values;
            for (std::size_t s = 0; s < suts.size(); ++s) {
                if (prime_path_group(*suts[s]) == group) {
                    values.push_back(spread_by_sut[s][gen]);
                }
            }
            spread_table += group + "," + std::to_string(gen) + "," +
                            fmt6(mean_of(values)) + "\n";
        }
    }
    write_file(fs::path(config.output_dir) / "stddev_by_complexity.csv",
               spread_table);

    std::vector<GeneralisationRow> all_rows;
    for (const GeneralisationCase& c : generalisation_cases()) {
        const SutDescriptor* training = find_sut(c.training);
        std::size_t index = registry_index(*training);
        std::vector<GeneralisationRow> rows =
            run_generalisation_case(c, results[index], config.ga);
        for (GeneralisationRow& row : rows) all_rows.push_back(std::move(row));
    }
    write_generalisation_csvs(config.output_dir, "generalisation_box.csv",
                              "generalisation_run_means.csv", all_rows);
}

} // namespace gmpforge
