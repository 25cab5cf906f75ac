#include "greenopt/runner.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "greenopt/num_format.hpp"
#include "greenopt/rng.hpp"
#include "greenopt/strategies.hpp"

namespace greenopt {

namespace {

// Stream salts keeping objective noise and energy noise independent per
// (seed, round, repetition).
constexpr std::uint64_t kObjectiveStream = 0x6f626a65637469ull;
constexpr std::uint64_t kEnergyStream = 0x656e65726779ull;

constexpr const char* kLogHeader = "# greenopt-log v1";

std::string sanitize_message(std::string msg) {
    for (char& c : msg)
        if (c == '\n' || c == '\r' || c == '\t')
            c = ' ';
    return msg;
}

std::string format_cell(const ParamSpec& spec, const Configuration& config, std::size_t i) {
    if (spec.is_categorical)
        return config.label_at(i);
    return format_double(config.number_at(i));
}

std::string column_header(const SearchSpace& space) {
    std::string line = "round\trepetition";
    for (const auto& p : space.params()) {
        line += '\t';
        line += p.name;
    }
    line += "\tscore\tjoules\tduration_s";
    return line;
}

void write_log_preamble(std::ostream& out, const ExperimentPlan& plan) {
    out << kLogHeader << '\n';
    std::istringstream snapshot(plan_to_config_text(plan));
    std::string line;
    while (std::getline(snapshot, line)) {
        if (line.empty())
            out << "# plan\n";
        else
            out << "# plan " << line << '\n';
    }
    out << column_header(plan.space) << '\n';
}

void write_round_block(std::ostream& out, const SearchSpace& space, const TrialRecord& trial) {
    // Rows and error comments merged back into repetition order.
    std::size_t ri = 0, ei = 0;
    while (ri < trial.reps.size() || ei < trial.errors.size()) {
        const bool take_rep =
            ei == trial.errors.size() ||
            (ri < trial.reps.size() && trial.reps[ri].repetition < trial.errors[ei].repetition);
        if (take_rep) {
            const RepOutcome& rep = trial.reps[ri++];
            out << trial.round << '\t' << rep.repetition;
            for (std::size_t i = 0; i < space.size(); ++i)
                out << '\t' << format_cell(space.at(i), trial.config, i);
            out << '\t' << format_double(rep.score) << '\t' << format_double(rep.joules) << '\t'
                << format_double(rep.duration_s) << '\n';
        } else {
            const RepError& err = trial.errors[ei++];
            out << "# error round=" << trial.round << " rep=" << err.repetition << " "
                << sanitize_message(err.message) << '\n';
        }
    }
}

struct RepetitionResult {
    bool ok = false;
    RepOutcome outcome{};
    std::string error;
};

RepetitionResult evaluate_repetition(const ExperimentPlan& plan, const ProfileLibrary& profiles,
                                     const Configuration& config, int round, int repetition) {
    RepetitionResult result;
    result.outcome.repetition = repetition;
    const std::uint64_t r = static_cast<std::uint64_t>(round);
    const std::uint64_t k = static_cast<std::uint64_t>(repetition);
    auto objective_rng = derive_rng(plan.seed, {r, k, kObjectiveStream});

    std::vector<std::string> problems;
    if (const auto* sampled = std::get_if<EnergySampled>(&plan.energy)) {
        std::stop_source stop;
        PowerTrace trace;
        std::exception_ptr sampler_failure;
        std::thread sampler([&] {
            try {
                trace = sample_power(sampled->source, sampled->interval_ms, stop.get_token());
            } catch (const PowerSamplingError& e) {
                trace = e.partial_trace;
                sampler_failure = std::current_exception();
            } catch (...) {
                sampler_failure = std::current_exception();
            }
        });
        try {
            const EvalResult eval =
                eval_objective(plan.objective, plan.space, config, profiles, objective_rng);
            result.outcome.score = eval.score;
            result.outcome.duration_s = eval.duration_s;
            result.ok = true;
        } catch (const std::exception& e) {
            problems.push_back(std::string("objective: ") + e.what());
        }
        stop.request_stop();
        sampler.join();
        if (sampler_failure) {
            try {
                std::rethrow_exception(sampler_failure);
            } catch (const std::exception& e) {
                problems.push_back(std::string("energy: ") + e.what());
                result.ok = false;
            }
        } else if (result.ok) {
            try {
                const EnergyReading reading = integrate_trace(trace, sampled->idle_watts);
                result.outcome.joules = reading.joules_net;
            } catch (const std::exception& e) {
                problems.push_back(std::string("energy: ") + e.what());
                result.ok = false;
            }
        }
    } else {
        try {
            const EvalResult eval =
                eval_objective(plan.objective, plan.space, config, profiles, objective_rng);
            result.outcome.score = eval.score;
            result.outcome.duration_s = eval.duration_s;
            result.ok = true;
        } catch (const std::exception& e) {
            problems.push_back(std::string("objective: ") + e.what());
        }
        if (result.ok) {
            if (const auto* simulated = std::get_if<EnergySimulated>(&plan.energy)) {
                try {
                    auto energy_rng = derive_rng(plan.seed, {r, k, kEnergyStream});
                    result.outcome.joules =
                        simulate_energy(simulated->arch, profiles.energy_profile(simulated->profile),
                                        &energy_rng)
                            .joules;
                } catch (const std::exception& e) {
                    problems.push_back(std::string("energy: ") + e.what());
                    result.ok = false;
                }
            } else {
                result.outcome.joules = 0.0;
            }
        }
    }

    if (!result.ok) {
        std::string joined;
        for (const auto& p : problems) {
            if (!joined.empty())
                joined += "; ";
            joined += p;
        }
        result.error = joined.empty() ? "unknown failure" : joined;
    }
    return result;
}

ResultsLog run_impl(const ExperimentPlan& plan, const std::string& log_path,
                    const ProfileLibrary& profiles, const RoundCallback& on_round, bool resume) {
    {
        const auto problems = validate_plan(plan);
        if (!problems.empty())
            throw RunError("invalid plan: " + problems.front());
    }

    ResultsLog prior;
    if (resume && !log_path.empty() && std::ifstream(log_path).good()) {
        prior = read_results_log(log_path);
        if (plan_to_config_text(prior.plan) != plan_to_config_text(plan))
            throw RunError("resume: log '" + log_path + "' was produced by a different plan");
    }

    auto strategy = make_strategy(plan.strategy_kind, plan.space, plan.seed, plan.strategy);

    ResultsLog log;
    log.plan = plan;

    // Replaying persisted rounds through the fresh strategy both restores its
    // internal state and cross-checks the log against the plan's seed.
    for (const TrialRecord& trial : prior.trials) {
        Configuration proposed = strategy->next_config();
        if (!(proposed == trial.config))
            throw RunError("resume: round " + std::to_string(trial.round) +
                           " of the log does not match the strategy's proposal");
        strategy->observe(proposed, trial.best_score());
        log.trials.push_back(trial);
    }

    std::ofstream out;
    if (!log_path.empty()) {
        out.open(log_path, std::ios::trunc);
        if (!out)
            throw RunError("cannot open log file '" + log_path + "' for writing");
        write_log_preamble(out, plan);
        for (const TrialRecord& trial : log.trials)
            write_round_block(out, plan.space, trial);
        out.flush();
    }

    const auto started = std::chrono::steady_clock::now();
    for (int round = static_cast<int>(log.trials.size()) + 1; round <= plan.rounds; ++round) {
        TrialRecord trial;
        trial.round = round;
        try {
            trial.config = strategy->next_config();
        } catch (const std::exception& e) {
            throw RunError(e.what());
        }

        for (int rep = 1; rep <= plan.repetitions; ++rep) {
            RepetitionResult r = evaluate_repetition(plan, profiles, trial.config, round, rep);
            if (r.ok)
                trial.reps.push_back(r.outcome);
            else
                trial.errors.push_back({rep, r.error});
        }

        if (out.is_open()) {
            write_round_block(out, plan.space, trial);
            out.flush();
        }
        if (trial.reps.empty())
            throw RunError("round " + std::to_string(round) + ": all " +
                           std::to_string(plan.repetitions) +
                           " repetitions failed; last error: " + trial.errors.back().message);

        strategy->observe(trial.config, trial.best_score());
        log.trials.push_back(trial);
        if (on_round)
            on_round(trial);
    }
    log.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return log;
}

Configuration parse_config_cells(const SearchSpace& space, const std::vector<std::string>& cells,
                                 std::size_t offset) {
    Configuration config;
    config.values.reserve(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        const std::string& cell = cells[offset + i];
        if (space.at(i).is_categorical)
            config.values.emplace_back(cell);
        else
            config.values.emplace_back(parse_double(cell));
    }
    space.check(config);
    return config;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

long parse_index(const std::string& cell, const char* what) {
    std::size_t consumed = 0;
    long value = 0;
    try {
        value = std::stol(cell, &consumed);
    } catch (const std::exception&) {
        throw RunError(std::string("bad ") + what + " '" + cell + "'");
    }
    if (consumed != cell.size() || value < 1)
        throw RunError(std::string("bad ") + what + " '" + cell + "'");
    return value;
}

// "# error round=N rep=K message"
RepError parse_error_comment(const std::string& line, int* round_out) {
    std::istringstream in(line);
    std::string hash, tag, round_field, rep_field;
    in >> hash >> tag >> round_field >> rep_field;
    if (hash != "#" || tag != "error" || round_field.rfind("round=", 0) != 0 ||
        rep_field.rfind("rep=", 0) != 0)
        throw RunError("malformed error comment: " + line);
    *round_out = static_cast<int>(parse_index(round_field.substr(6), "round"));
    RepError err;
    err.repetition = static_cast<int>(parse_index(rep_field.substr(4), "repetition"));
    std::string rest;
    std::getline(in, rest);
    err.message = trim(rest);
    return err;
}

bool trial_complete(const TrialRecord& trial, int repetitions) {
    return !trial.reps.empty() &&
           trial.reps.size() + trial.errors.size() == static_cast<std::size_t>(repetitions);
}

}  // namespace

double TrialRecord::best_score() const {
    if (reps.empty())
        throw std::logic_error("best_score of a round with no successful repetitions");
    double best = reps.front().score;
    for (const auto& r : reps)
        best = std::max(best, r.score);
    return best;
}

double TrialRecord::mean_joules() const {
    if (reps.empty())
        throw std::logic_error("mean_joules of a round with no successful repetitions");
    double sum = 0.0;
    for (const auto& r : reps)
        sum += r.joules;
    return sum / static_cast<double>(reps.size());
}

double TrialRecord::total_joules() const {
    double sum = 0.0;
    for (const auto& r : reps)
        sum += r.joules;
    return sum;
}

double ResultsLog::total_joules() const {
    double sum = 0.0;
    for (const auto& t : trials)
        sum += t.total_joules();
    return sum;
}

std::vector<double> ResultsLog::round_best_scores() const {
    std::vector<double> out;
    out.reserve(trials.size());
    for (const auto& t : trials)
        out.push_back(t.best_score());
    return out;
}

ResultsLog run_experiment(const ExperimentPlan& plan, const std::string& log_path,
                          const ProfileLibrary& profiles, const RoundCallback& on_round) {
    return run_impl(plan, log_path, profiles, on_round, false);
}

ResultsLog resume_experiment(const ExperimentPlan& plan, const std::string& log_path,
                             const ProfileLibrary& profiles, const RoundCallback& on_round) {
    return run_impl(plan, log_path, profiles, on_round, true);
}

ResultsLog read_results_log(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw RunError("cannot open log file '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        lines.push_back(line);
    }
    std::size_t last_content = lines.size();
    while (last_content > 0 && trim(lines[last_content - 1]).empty())
        --last_content;
    if (last_content == 0 || lines[0] != kLogHeader)
        throw RunError("'" + path + "' is not a results log (missing '" +
                       std::string(kLogHeader) + "')");

    // Plan snapshot.
    std::string plan_text;
    std::size_t idx = 1;
    for (; idx < lines.size(); ++idx) {
        const std::string& l = lines[idx];
        if (l == "# plan")
            plan_text += '\n';
        else if (l.rfind("# plan ", 0) == 0)
            plan_text += l.substr(7) + '\n';
        else
            break;
    }
    if (plan_text.empty())
        throw RunError("'" + path + "' has no plan snapshot");
    ResultsLog log;
    log.plan = plan_from_config(TextConfig::parse_string(plan_text, path + " (plan snapshot)"));

    if (idx >= lines.size() || lines[idx] != column_header(log.plan.space))
        throw RunError("'" + path + "' has an unexpected column header");
    ++idx;

    const std::size_t expected_cells = 2 + log.plan.space.size() + 3;
    for (; idx < lines.size(); ++idx) {
        const std::string& l = lines[idx];
        if (trim(l).empty())
            continue;
        try {
            if (l.rfind("# error", 0) == 0) {
                int round = 0;
                RepError err = parse_error_comment(l, &round);
                if (log.trials.empty() || log.trials.back().round != round) {
                    // An all-failed round may open with an error comment; the
                    // config is unknown until a data row arrives (it never
                    // does for a fully failed round).
                    TrialRecord t;
                    t.round = round;
                    log.trials.push_back(t);
                }
                log.trials.back().errors.push_back(std::move(err));
                continue;
            }
            if (l[0] == '#')
                continue;
            const auto cells = split_tabs(l);
            if (cells.size() != expected_cells)
                throw RunError("expected " + std::to_string(expected_cells) + " columns, got " +
                               std::to_string(cells.size()));
            RepOutcome rep;
            const int round = static_cast<int>(parse_index(cells[0], "round"));
            rep.repetition = static_cast<int>(parse_index(cells[1], "repetition"));
            Configuration config = parse_config_cells(log.plan.space, cells, 2);
            rep.score = parse_double(cells[2 + log.plan.space.size()]);
            rep.joules = parse_double(cells[3 + log.plan.space.size()]);
            rep.duration_s = parse_double(cells[4 + log.plan.space.size()]);
            if (log.trials.empty() || log.trials.back().round != round) {
                TrialRecord t;
                t.round = round;
                t.config = std::move(config);
                log.trials.push_back(t);
            } else if (log.trials.back().config.values.empty()) {
                log.trials.back().config = std::move(config);
            } else if (!(log.trials.back().config == config)) {
                throw RunError("configuration changes within round " + std::to_string(round));
            }
            log.trials.back().reps.push_back(rep);
        } catch (const std::exception& e) {
            // A crash mid-write can leave one torn final line; anything
            // malformed earlier is corruption.
            if (idx + 1 >= last_content) {
                if (!log.trials.empty() && !trial_complete(log.trials.back(), log.plan.repetitions))
                    log.trials.pop_back();
                break;
            }
            throw RunError(path + ":" + std::to_string(idx + 1) + ": " + e.what());
        }
    }

    // Trailing partial round (interrupted run): drop it so resume redoes it.
    if (!log.trials.empty() && !trial_complete(log.trials.back(), log.plan.repetitions))
        log.trials.pop_back();

    for (std::size_t i = 0; i < log.trials.size(); ++i) {
        const TrialRecord& t = log.trials[i];
        if (t.round != static_cast<int>(i) + 1)
            throw RunError("'" + path + "': round indices are not contiguous from 1");
        if (!trial_complete(t, log.plan.repetitions))
            throw RunError("'" + path + "': round " + std::to_string(t.round) + " is incomplete");
    }
    return log;
}

void write_results_log(std::ostream& out, const ResultsLog& log) {
    write_log_preamble(out, log.plan);
    for (const TrialRecord& trial : log.trials)
        write_round_block(out, log.plan.space, trial);
}

}  // namespace greenopt
