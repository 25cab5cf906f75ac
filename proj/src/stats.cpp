#include "greenopt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace greenopt {

double coefficient_of_variation(const std::vector<double>& values) {
    if (values.size() < 2)
        throw std::invalid_argument("coefficient of variation needs at least 2 values");
    double mean = 0.0;
    for (double v : values) {
        if (!std::isfinite(v))
            throw std::invalid_argument("coefficient of variation requires finite values");
        mean += v;
    }
    mean /= static_cast<double>(values.size());
    if (mean == 0.0)
        throw std::invalid_argument("coefficient of variation undefined for zero mean");
    double ss = 0.0;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    return sd / mean;
}

std::string_view to_string(Magnitude m) {
    switch (m) {
        case Magnitude::negligible: return "negligible";
        case Magnitude::small: return "small";
        case Magnitude::medium: return "medium";
        case Magnitude::large: return "large";
    }
    return "?";
}

Magnitude classify_magnitude(double eta_squared) {
    if (!std::isfinite(eta_squared))
        throw std::invalid_argument("eta squared must be finite");
    if (eta_squared < 0.01)
        return Magnitude::negligible;
    if (eta_squared < 0.06)
        return Magnitude::small;
    if (eta_squared < 0.14)
        return Magnitude::medium;
    return Magnitude::large;
}

double cohen_f(double eta_squared) {
    if (!(eta_squared >= 0.0))
        throw std::invalid_argument("eta squared must be >= 0");
    if (eta_squared >= 1.0)
        throw std::invalid_argument("eta squared >= 1 gives an unbounded effect size");
    return std::sqrt(eta_squared / (1.0 - eta_squared));
}

double chi_square_sf(double x, std::size_t df) {
    if (df == 0)
        throw std::invalid_argument("chi-square df must be >= 1");
    if (x < 0.0)
        throw std::invalid_argument("chi-square statistic must be >= 0");
    if (x == 0.0)
        return 1.0;
    return boost::math::gamma_q(static_cast<double>(df) / 2.0, x / 2.0);
}

KwResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    const std::size_t k = groups.size();
    if (k < 2)
        throw std::invalid_argument("kruskal-wallis needs at least 2 groups");
    std::size_t n = 0;
    for (const auto& g : groups) {
        if (g.empty())
            throw std::invalid_argument("kruskal-wallis groups must be non-empty");
        for (double v : g)
            if (!std::isfinite(v))
                throw std::invalid_argument("kruskal-wallis requires finite values");
        n += g.size();
    }
    if (n <= k)
        throw std::invalid_argument("kruskal-wallis needs more values than groups");

    // Pool, sort, and assign midranks to runs of equal values.
    std::vector<std::pair<double, std::size_t>> pooled;  // (value, group)
    pooled.reserve(n);
    for (std::size_t g = 0; g < k; ++g)
        for (double v : groups[g])
            pooled.emplace_back(v, g);
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<double> rank_sum(k, 0.0);
    double tie_term = 0.0;  // sum of t^3 - t over tie runs
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && pooled[j].first == pooled[i].first)
            ++j;
        const double t = static_cast<double>(j - i);
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t m = i; m < j; ++m)
            rank_sum[pooled[m].second] += midrank;
        tie_term += t * t * t - t;
        i = j;
    }

    const double nd = static_cast<double>(n);
    double h = 0.0;
    for (std::size_t g = 0; g < k; ++g)
        h += rank_sum[g] * rank_sum[g] / static_cast<double>(groups[g].size());
    h = 12.0 / (nd * (nd + 1.0)) * h - 3.0 * (nd + 1.0);

    const double correction = 1.0 - tie_term / (nd * nd * nd - nd);
    h = correction == 0.0 ? 0.0 : h / correction;  // every value tied: no information
    if (h < 0.0 && h > -1e-12)
        h = 0.0;  // guard tiny negative round-off

    KwResult r;
    r.h_statistic = h;
    r.df = k - 1;
    r.p_value = chi_square_sf(h, r.df);
    r.eta_squared =
        std::max(0.0, (h - static_cast<double>(k) + 1.0) / (nd - static_cast<double>(k)));
    r.magnitude = classify_magnitude(r.eta_squared);
    return r;
}

std::vector<ConvergencePoint> best_so_far(const std::vector<double>& scores) {
    std::vector<ConvergencePoint> out;
    out.reserve(scores.size());
    double best = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i]))
            throw std::invalid_argument("best_so_far requires finite scores");
        best = i == 0 ? scores[i] : std::max(best, scores[i]);
        out.push_back({i + 1, best});
    }
    return out;
}

OptimumRound optimum_round(const std::vector<ConvergencePoint>& series, double delta) {
    if (series.empty())
        throw std::invalid_argument("optimum_round needs a non-empty series");
    if (delta < 0.0)
        throw std::invalid_argument("delta must be >= 0");
    // Last round whose single-round improvement exceeds delta; afterwards
    // every additional round gains at most delta.
    std::size_t idx = 0;
    for (std::size_t i = 1; i < series.size(); ++i)
        if (series[i].best - series[i - 1].best > delta)
            idx = i;
    return {series[idx].round, series[idx].best};
}

}  // namespace greenopt
