#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "greenopt/plan.hpp"
#include "greenopt/reports.hpp"
#include "greenopt/runner.hpp"

namespace {

using namespace greenopt;

ProfileLibrary load_profiles(const ExperimentPlan& plan) {
    return plan.profiles_path.empty() ? ProfileLibrary::builtin()
                                      : ProfileLibrary::load(plan.profiles_path);
}

// Throws ConfigError on structural problems; prints semantic problems and
// returns false so the caller can exit with a usage error.
bool load_plan(const std::string& config_path, const std::string& profiles_override,
               bool power_override, ExperimentPlan& plan) {
    plan = plan_from_config(TextConfig::parse_file(config_path));
    if (!profiles_override.empty())
        plan.profiles_path = profiles_override;
    if (power_override)
        apply_power_command_override(plan);
    const auto problems = validate_plan(plan);
    for (const auto& p : problems)
        std::cerr << config_path << ": " << p << "\n";
    return problems.empty();
}

std::filesystem::path prepare_out_dir(const std::string& out_dir) {
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

std::vector<ResultsLog> read_logs(const std::vector<std::string>& paths) {
    std::vector<ResultsLog> logs;
    logs.reserve(paths.size());
    for (const auto& path : paths)
        logs.push_back(read_results_log(path));
    return logs;
}

int cmd_run(const std::string& config_path, std::string log_path,
            const std::string& profiles_override, bool resume) {
    ExperimentPlan plan;
    if (!load_plan(config_path, profiles_override, true, plan))
        return 1;
    if (log_path.empty())
        log_path = plan.name + ".log";
    const ProfileLibrary profiles = load_profiles(plan);
    const ResultsLog log = resume ? resume_experiment(plan, log_path, profiles)
                                  : run_experiment(plan, log_path, profiles);
    std::cout << summary_table({log});
    std::cout << "log: " << log_path << "\n";
    std::cout << "wall_clock_s: " << log.elapsed_s << "\n";
    return 0;
}

int cmd_validate(const std::string& config_path) {
    ExperimentPlan plan;
    if (!load_plan(config_path, "", false, plan))
        return 1;
    std::cout << plan_to_config_text(plan);
    return 0;
}

int cmd_report(const std::vector<std::string>& log_paths, const std::string& out_dir,
               double delta) {
    const auto logs = read_logs(log_paths);
    const auto dir = prepare_out_dir(out_dir);

    const std::string summary = summary_table(logs, delta);
    std::cout << summary;
    write_text_file(dir / "summary.txt", summary);

    {
        std::ofstream out(dir / "convergence.tsv");
        write_convergence_tsv(out, logs);
    }
    const bool any_energy = std::any_of(logs.begin(), logs.end(), [](const ResultsLog& log) {
        return !std::holds_alternative<EnergyOff>(log.plan.energy);
    });
    if (any_energy) {
        std::ofstream out(dir / "scatter.tsv");
        write_scatter_tsv(out, logs);
    }
    return 0;
}

int cmd_analyze(const std::vector<std::string>& log_paths, const std::vector<std::string>& factors,
                const std::string& out_dir) {
    const auto logs = read_logs(log_paths);
    const auto dir = prepare_out_dir(out_dir);

    const auto analyses = analyze_factors(logs, factors);
    const std::string table = analysis_table(analyses);
    std::cout << table;
    write_text_file(dir / "analysis.txt", table);

    std::ofstream out(dir / "cv.tsv");
    write_cv_tsv(out, per_round_cvs(logs));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"greenopt: energy-aware black-box hyperparameter search"};
    app.require_subcommand(1);

    std::string config_path, log_path, profiles_override, out_dir = ".";
    std::vector<std::string> log_paths, factors;
    double delta = 0.005;

    auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--log", log_path, "results log path (default: <name>.log)");
    run->add_option("--profiles", profiles_override, "dataset profile file overriding builtins");

    auto* resume = app.add_subcommand("resume", "Continue an interrupted run from its log");
    resume->add_option("config", config_path, "experiment config file")->required();
    resume->add_option("log", log_path, "results log of the interrupted run")->required();
    resume->add_option("--profiles", profiles_override, "dataset profile file overriding builtins");

    auto* report = app.add_subcommand("report", "Summarize one or more results logs");
    report->add_option("logs", log_paths, "results log files")->required();
    report->add_option("--out-dir", out_dir, "directory for report artifacts (default: .)");
    report->add_option("--delta", delta, "optimum-round improvement threshold (default: 0.005)");

    auto* analyze = app.add_subcommand("analyze", "Group energy by factors and test for effects");
    analyze->add_option("logs", log_paths, "results log files")->required();
    analyze->add_option("--factor", factors, "architecture field to group by (repeatable)")
        ->required();
    analyze->add_option("--out-dir", out_dir, "directory for analysis artifacts (default: .)");

    auto* validate = app.add_subcommand("validate", "Check a config file and echo the full plan");
    validate->add_option("config", config_path, "experiment config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (run->parsed())
            return cmd_run(config_path, log_path, profiles_override, false);
        if (resume->parsed())
            return cmd_run(config_path, log_path, profiles_override, true);
        if (report->parsed())
            return cmd_report(log_paths, out_dir, delta);
        if (analyze->parsed())
            return cmd_analyze(log_paths, factors, out_dir);
        if (validate->parsed())
            return cmd_validate(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
