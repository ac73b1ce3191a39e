#pragma once

#include <string>
#include <vector>

#include "gmpforge/ga.hpp"
#include "gmpforge/sut.hpp"

namespace gmpforge {

// One reuse trial: micro-programs bred against the training component are
// re-scored, unchanged, against each test component.
struct GeneralisationCase {
    std::string training;
    std::vector<std::string> tests;
};

// The fixed pairing table. Every test component shares the training
// component's return kind and a prefix of its parameter kinds.
const std::vector<GeneralisationCase>& generalisation_cases();

struct StudyConfig {
    GaConfig ga;
    std::string output_dir;
    int jobs = 1;
};

// Five-number summary plus mean and spread; quantiles use linear
// interpolation between order statistics.
struct BoxStats {
    double mean;
    double std_dev;
    double min;
    double q1;
    double median;
    double q3;
    double max;
};

BoxStats summarize(std::vector<double> values);

// Buckets a component by how many prime paths its graph has: "2", "3" or
// "4-5".
std::string prime_path_group(const SutDescriptor& sut);

// results[i] holds the runs for suts[i], ordered by run index.
using SuiteResults = std::vector<std::vector<TrainResult>>;

// Trains every listed component for config.ga.runs_per_case runs, spreading
// (component, run) jobs over config.jobs threads, and writes each run's
// statistics and top-ten micro-programs under the output directory. Output
// bytes do not depend on the thread count.
SuiteResults train_components(const StudyConfig& config,
                              const std::vector<const SutDescriptor*>& suts);

struct GeneralisationRow {
    std::string training;
    std::string test;
    std::vector<double> fitness; // run-major: run 0's top ten first
    std::vector<double> run_means;
    BoxStats stats;
};

// Rebuilds the trained micro-programs from their serialized form and scores
// them, without further evolution, against each test component.
std::vector<GeneralisationRow> run_generalisation_case(
    const GeneralisationCase& c, const std::vector<TrainResult>& runs,
    const GaConfig& config);

// Reads one component's training artifacts back from disk; throws
// ArtifactError when they are missing or unreadable.
std::vector<TrainResult> load_train_results(const std::string& output_dir,
                                            const SutDescriptor& sut,
                                            int runs);

void write_generalisation_csvs(const std::string& output_dir,
                               const std::string& box_name,
                               const std::string& run_means_name,
                               const std::vector<GeneralisationRow>& rows);

// Trains the whole corpus, emits the aggregate fitness-curve and spread
// tables, then runs every generalisation case.
void run_full_study(const StudyConfig& config);

} // namespace gmpforge
