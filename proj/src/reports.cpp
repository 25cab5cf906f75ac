#include "greenopt/reports.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "greenopt/num_format.hpp"

namespace greenopt {

namespace {

std::string fixed_str(double v, int precision) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(precision) << v;
    return out.str();
}

std::string p_value_str(double p) {
    if (p < 0.001)
        return "<0.001";
    return fixed_str(p, 3);
}

// Aligned text table: first column left-justified, the rest right-justified.
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        if (widths.size() < row.size())
            widths.resize(row.size(), 0);
        for (std::size_t c = 0; c < row.size(); ++c)
            widths[c] = std::max(widths[c], row[c].size());
    }
    std::string out;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0)
                line += "  ";
            const std::size_t pad = widths[c] - row[c].size();
            if (c == 0)
                line += row[c] + std::string(pad, ' ');
            else
                line += std::string(pad, ' ') + row[c];
        }
        while (!line.empty() && line.back() == ' ')
            line.pop_back();
        out += line + "\n";
    }
    return out;
}

std::size_t total_evaluations(const ResultsLog& log) {
    std::size_t n = 0;
    for (const auto& t : log.trials)
        n += t.reps.size() + t.errors.size();
    return n;
}

bool energy_enabled(const ResultsLog& log) {
    return !std::holds_alternative<EnergyOff>(log.plan.energy);
}

const ArchDescriptor* plan_arch(const ExperimentPlan& plan) {
    if (const auto* simulated = std::get_if<EnergySimulated>(&plan.energy))
        return &simulated->arch;
    if (const auto* sim = std::get_if<SimTrainerSpec>(&plan.objective))
        return &sim->arch;
    return nullptr;
}

}  // namespace

std::string summary_table(const std::vector<ResultsLog>& logs, double delta) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"run", "strategy", "rounds", "evals", "optimum_score", "optimum_round",
                    "total_joules"});
    for (const auto& log : logs) {
        const auto curve = best_so_far(log.round_best_scores());
        const OptimumRound opt = optimum_round(curve, delta);
        rows.push_back({log.plan.name, log.plan.strategy_kind, std::to_string(log.trials.size()),
                        std::to_string(total_evaluations(log)), fixed_str(opt.score, 4),
                        std::to_string(opt.round), fixed_str(log.total_joules(), 1)});
    }
    return render_table(rows);
}

void write_convergence_tsv(std::ostream& out, const std::vector<ResultsLog>& logs) {
    out << "# greenopt-convergence v1\n";
    out << "round";
    for (const auto& log : logs)
        out << '\t' << log.plan.name;
    out << '\n';

    std::vector<std::vector<ConvergencePoint>> curves;
    std::size_t max_rounds = 0;
    for (const auto& log : logs) {
        curves.push_back(best_so_far(log.round_best_scores()));
        max_rounds = std::max(max_rounds, curves.back().size());
    }
    for (std::size_t r = 0; r < max_rounds; ++r) {
        out << (r + 1);
        for (const auto& curve : curves) {
            out << '\t';
            if (r < curve.size())
                out << format_double(curve[r].best);
        }
        out << '\n';
    }
}

void write_scatter_tsv(std::ostream& out, const std::vector<ResultsLog>& logs) {
    out << "# greenopt-scatter v1\n";
    out << "joules\tscore\trun\n";
    for (const auto& log : logs) {
        if (!energy_enabled(log))
            continue;
        for (const auto& trial : log.trials)
            for (const auto& rep : trial.reps)
                out << format_double(rep.joules) << '\t' << format_double(rep.score) << '\t'
                    << log.plan.name << '\n';
    }
}

std::vector<FactorAnalysis> analyze_factors(const std::vector<ResultsLog>& logs,
                                            const std::vector<std::string>& factors) {
    if (logs.empty())
        throw std::invalid_argument("no logs to analyze");
    std::vector<FactorAnalysis> out;
    out.reserve(factors.size());
    for (const auto& factor : factors) {
        std::map<int, std::vector<double>> by_level;
        for (const auto& log : logs) {
            const ArchDescriptor* arch = plan_arch(log.plan);
            if (!arch)
                throw std::invalid_argument("run '" + log.plan.name +
                                            "' declares no architecture; cannot group by '" +
                                            factor + "'");
            const int level = arch->field(factor);
            auto& bucket = by_level[level];
            for (const auto& trial : log.trials)
                for (const auto& rep : trial.reps)
                    bucket.push_back(rep.joules);
        }
        if (by_level.size() < 2)
            throw std::invalid_argument("factor '" + factor +
                                        "' takes a single value across the given runs");
        std::vector<std::vector<double>> groups;
        groups.reserve(by_level.size());
        for (auto& [level, values] : by_level)
            groups.push_back(std::move(values));
        out.push_back({factor, groups.size(), kruskal_wallis(groups)});
    }
    return out;
}

std::string analysis_table(const std::vector<FactorAnalysis>& analyses) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"factor", "groups", "H", "p", "eta_squared", "magnitude"});
    for (const auto& a : analyses)
        rows.push_back({a.factor, std::to_string(a.group_count), fixed_str(a.kw.h_statistic, 3),
                        p_value_str(a.kw.p_value), fixed_str(a.kw.eta_squared, 3),
                        std::string(to_string(a.kw.magnitude))});
    return render_table(rows);
}

std::vector<double> per_round_cvs(const std::vector<ResultsLog>& logs) {
    std::vector<double> cvs;
    for (const auto& log : logs) {
        if (!energy_enabled(log))
            continue;
        for (const auto& trial : log.trials) {
            if (trial.reps.size() < 2)
                continue;
            std::vector<double> joules;
            joules.reserve(trial.reps.size());
            for (const auto& rep : trial.reps)
                joules.push_back(rep.joules);
            if (trial.mean_joules() == 0.0)
                continue;
            cvs.push_back(coefficient_of_variation(joules));
        }
    }
    return cvs;
}

void write_cv_tsv(std::ostream& out, const std::vector<double>& cvs) {
    out << "# greenopt-cv v1\n";
    out << "cv\n";
    for (double cv : cvs)
        out << format_double(cv) << '\n';
    if (cvs.empty())
        return;
    // Histogram block as trailing comments: "# histogram <lo> <hi> <count>".
    const double max_cv = *std::max_element(cvs.begin(), cvs.end());
    const double hi_edge = max_cv > 0.0 ? max_cv : 1.0;
    constexpr int kBins = 10;
    std::vector<std::size_t> counts(kBins, 0);
    for (double cv : cvs) {
        int bin = static_cast<int>(std::floor(cv / hi_edge * kBins));
        bin = std::clamp(bin, 0, kBins - 1);
        ++counts[static_cast<std::size_t>(bin)];
    }
    for (int b = 0; b < kBins; ++b)
        out << "# histogram " << format_double(hi_edge * b / kBins) << ' '
            << format_double(hi_edge * (b + 1) / kBins) << ' ' << counts[static_cast<std::size_t>(b)]
            << '\n';
}

}  // namespace greenopt
