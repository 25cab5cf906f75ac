#pragma once

#include <chrono>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "greenopt/plan.hpp"
#include "greenopt/profiles.hpp"

namespace greenopt {

struct RepOutcome {
    int repetition;  // 1-indexed
    double score;
    double joules;
    double duration_s;
};

struct RepError {
    int repetition;  // 1-indexed
    std::string message;
};

struct TrialRecord {
    int round;  // 1-indexed
    Configuration config;
    std::vector<RepOutcome> reps;   // successful repetitions only
    std::vector<RepError> errors;   // one entry per failed repetition

    double best_score() const;  // max over successful reps
    double mean_joules() const;
    double total_joules() const;
};

struct ResultsLog {
    ExperimentPlan plan;
    std::vector<TrialRecord> trials;
    // Wall-clock bookkeeping lives only in memory; the serialized log is
    // restricted to deterministic content.
    double elapsed_s = 0.0;

    double total_joules() const;
    std::vector<double> round_best_scores() const;
};

class RunError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using RoundCallback = std::function<void(const TrialRecord&)>;

// Runs the plan, appending each completed round to log_path (no persistence
// when log_path is empty). A round whose repetitions all fail aborts with
// RunError after persisting the rounds completed so far.
ResultsLog run_experiment(const ExperimentPlan&, const std::string& log_path,
                          const ProfileLibrary&, const RoundCallback& on_round = {});

// Replays the rounds already present in log_path through a fresh strategy
// (verifying they match the plan), then continues to plan.rounds. The file is
// rewritten; for deterministic objectives the result is byte-identical to an
// uninterrupted run.
ResultsLog resume_experiment(const ExperimentPlan&, const std::string& log_path,
                             const ProfileLibrary&, const RoundCallback& on_round = {});

ResultsLog read_results_log(const std::string& path);
void write_results_log(std::ostream&, const ResultsLog&);

}  // namespace greenopt
