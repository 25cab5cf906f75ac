#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "greenopt/runner.hpp"
#include "greenopt/stats.hpp"

namespace greenopt {

// Aligned text table: one row per run with optimum accuracy, optimum round,
// and total Joules.
std::string summary_table(const std::vector<ResultsLog>&, double delta = 0.005);

// Merged best-so-far columns, one per log, labeled with the plan names.
// Shorter runs leave trailing cells empty.
void write_convergence_tsv(std::ostream&, const std::vector<ResultsLog>&);

// One (energy, accuracy) row per repetition of every energy-enabled log.
void write_scatter_tsv(std::ostream&, const std::vector<ResultsLog>&);

struct FactorAnalysis {
    std::string factor;
    std::size_t group_count;
    KwResult kw;
};

// Groups per-repetition Joules of all logs by the factor's value in each
// log's plan (simulated-energy arch, else sim_trainer arch) and runs a
// Kruskal-Wallis test per factor.
std::vector<FactorAnalysis> analyze_factors(const std::vector<ResultsLog>&,
                                            const std::vector<std::string>& factors);

std::string analysis_table(const std::vector<FactorAnalysis>&);

// Coefficient of variation of the repetition Joules of every round with at
// least two successful repetitions and nonzero mean energy.
std::vector<double> per_round_cvs(const std::vector<ResultsLog>&);
void write_cv_tsv(std::ostream&, const std::vector<double>& cvs);

}  // namespace greenopt
