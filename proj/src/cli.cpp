#include "gmpforge/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "gmpforge/error.hpp"
#include "gmpforge/experiment.hpp"
#include "gmpforge/gmp_text.hpp"

namespace gmpforge {

namespace {

std::string default_output_dir() {
    const char* env = std::getenv("GMP_FORGE_OUT");
    if (env != nullptr && *env != '\0') return env;
    std::time_t now = std::time(nullptr);
    std::tm parts{};
    gmtime_r(&now, &parts);
    char buf[32];
    std::strftime(buf, sizeof buf, "out/%Y%m%d-%H%M%S", &parts);
    return buf;
}

std::string signature_text(const Signature& sig) {
    std::string out = "(";
    for (std::size_t i = 0; i < sig.param_kinds.size(); ++i) {
        if (i > 0) out += ", ";
        out += kind_name(sig.param_kinds[i]);
    }
    out += ") -> ";
    out += kind_name(sig.return_kind);
    return out;
}

struct CliOptions {
    StudyConfig study;
    std::string sut_name;
    std::string training_object;
    std::string inspect_path;
};

void add_ga_flags(CLI::App& cmd, CliOptions& opts) {
    GaConfig& ga = opts.study.ga;
    cmd.add_option("--seed", ga.master_seed, "master random seed");
    cmd.add_option("--output-dir", opts.study.output_dir, "artifact directory");
    cmd.add_option("--jobs", opts.study.jobs, "worker threads");
    cmd.add_option("--population-size", ga.population_size);
    cmd.add_option("--generations", ga.generations);
    cmd.add_option("--runs-per-case", ga.runs_per_case);
    cmd.add_option("--reproduction-rate", ga.reproduction_rate);
    cmd.add_option("--mutation-rate", ga.mutation_rate);
    cmd.add_option("--crossover-rate", ga.crossover_rate);
    cmd.add_option("--mutation-depth", ga.mutation_depth);
    cmd.add_option("--tournament-size", ga.tournament_size);
    cmd.add_option("--input-budget", ga.training_budget,
                   "inputs generated per fitness evaluation");
    cmd.add_option("--terminal-chance", ga.generation.terminal_chance);
    cmd.add_option("--max-function-depth", ga.generation.max_function_depth);
    cmd.add_option("--max-main-depth", ga.generation.max_main_depth);
}

void do_list_suts(std::ostream& out) {
    std::size_t width = 0;
    for (const SutDescriptor& sut : registry()) {
        width = std::max(width, sut.name.size());
    }
    for (const SutDescriptor& sut : registry()) {
        out << sut.name << std::string(width - sut.name.size() + 2, ' ')
            << signature_text(sut.signature) << "  "
            << sut.graph.prime_paths().size() << " prime paths\n";
    }
}

void do_train(const CliOptions& opts, std::ostream& out) {
    const SutDescriptor* sut = find_sut(opts.sut_name);
    if (sut == nullptr) {
        throw ConfigError("unknown component \"" + opts.sut_name + "\"");
    }
    out << "training " << sut->name << " for " << opts.study.ga.runs_per_case
        << " runs\n";
    SuiteResults results = train_components(opts.study, {sut});
    for (const TrainResult& run : results.front()) {
        double final_best = run.stats.back().best_fitness;
        double peak = 0.0;
        for (const GenerationStats& row : run.stats) {
            peak = std::max(peak, row.best_fitness);
        }
        char line[128];
        std::snprintf(line, sizeof line,
                      "run %d: final best %.6f, peak best %.6f\n",
                      run.run_index, final_best, peak);
        out << line;
    }
    out << "artifacts: " << opts.study.output_dir << "\n";
}

void do_generalise(const CliOptions& opts, std::ostream& out) {
    const SutDescriptor* sut = find_sut(opts.training_object);
    if (sut == nullptr) {
        throw ConfigError("unknown component \"" + opts.training_object + "\"");
    }
    const GeneralisationCase* found = nullptr;
    for (const GeneralisationCase& c : generalisation_cases()) {
        if (find_sut(c.training) == sut) {
            found = &c;
            break;
        }
    }
    if (found == nullptr) {
        throw ConfigError(sut->name + " is not a training object");
    }
    std::vector<TrainResult> runs = load_train_results(
        opts.study.output_dir, *sut, opts.study.ga.runs_per_case);
    std::vector<GeneralisationRow> rows =
        run_generalisation_case(*found, runs, opts.study.ga);
    std::string slug = sut_slug(sut->name);
    write_generalisation_csvs(opts.study.output_dir, slug + "_box.csv",
                              slug + "_run_means.csv", rows);
    for (const GeneralisationRow& row : rows) {
        char line[256];
        std::snprintf(line, sizeof line,
                      "%s -> %s: mean %.6f, median %.6f, range [%.6f, %.6f]\n",
                      row.training.c_str(), row.test.c_str(), row.stats.mean,
                      row.stats.median, row.stats.min, row.stats.max);
        out << line;
    }
}

void do_inspect(const CliOptions& opts, std::ostream& out) {
    std::ifstream in(opts.inspect_path, std::ios::binary);
    if (!in) throw ArtifactError("cannot read " + opts.inspect_path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    try {
        GmpIndividual individual = parse_gmp(text);
        out << pretty_print_gmp(individual);
        return;
    } catch (const gmpforge::ParseError&) {
        // fall through to the bare-tree form
    }
    out << pretty_print_tree(*parse_tree(text));
}

void do_full_study(const CliOptions& opts, std::ostream& out) {
    out << "running the full study into " << opts.study.output_dir << "\n";
    run_full_study(opts.study);
    out << "trained " << registry().size() << " components, "
        << opts.study.ga.runs_per_case << " runs each\n";
    std::size_t pairs = 0;
    for (const GeneralisationCase& c : generalisation_cases()) {
        pairs += c.tests.size();
    }
    out << "scored " << pairs << " generalisation pairs\n";
    out << "artifacts: " << opts.study.output_dir << "\n";
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"breeds typed micro-programs that exercise instrumented "
                 "software components"};
    app.name("gmpforge");
    app.require_subcommand(1);

    CliOptions opts;
    opts.study.output_dir = default_output_dir();

    app.add_subcommand("list-suts", "list the component corpus");

    CLI::App* train_cmd =
        app.add_subcommand("train", "breed micro-programs for one component");
    train_cmd->add_option("--sut", opts.sut_name, "component name")->required();
    add_ga_flags(*train_cmd, opts);

    CLI::App* gen_cmd = app.add_subcommand(
        "generalise", "score trained micro-programs on unseen components");
    gen_cmd->add_option("--training-object", opts.training_object,
                        "component the micro-programs were trained on")
        ->required();
    add_ga_flags(*gen_cmd, opts);

    CLI::App* inspect_cmd =
        app.add_subcommand("inspect", "pretty-print a serialized micro-program");
    inspect_cmd->add_option("file", opts.inspect_path, "path to a .gmp file")
        ->required();

    CLI::App* study_cmd = app.add_subcommand(
        "full-study", "train the whole corpus then run every reuse case");
    add_ga_flags(*study_cmd, opts);
    study_cmd->get_option("--seed")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand("list-suts")) {
            do_list_suts(out);
        } else if (app.got_subcommand(train_cmd)) {
            do_train(opts, out);
        } else if (app.got_subcommand(gen_cmd)) {
            do_generalise(opts, out);
        } else if (app.got_subcommand(inspect_cmd)) {
            do_inspect(opts, out);
        } else if (app.got_subcommand(study_cmd)) {
            do_full_study(opts, out);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}

} // namespace gmpforge
