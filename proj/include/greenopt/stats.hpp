#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace greenopt {

// Sample (n-1) standard deviation over the mean. Errors on fewer than two
// values or a zero mean.
double coefficient_of_variation(const std::vector<double>& values);

enum class Magnitude { negligible, small, medium, large };
std::string_view to_string(Magnitude);

// Thresholds on eta^2: < 0.01 negligible, < 0.06 small, < 0.14 medium.
Magnitude classify_magnitude(double eta_squared);

// sqrt(eta^2 / (1 - eta^2)); errors outside [0, 1).
double cohen_f(double eta_squared);

// Chi-square survival function via the regularized incomplete gamma.
double chi_square_sf(double x, std::size_t df);

struct KwResult {
    double h_statistic;
    std::size_t df;
    double p_value;
    double eta_squared;
    Magnitude magnitude;
};

// Midranks with tie correction; df = k - 1, eta^2 = max(0, (H-k+1)/(n-k)).
KwResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

struct ConvergencePoint {
    std::size_t round;  // 1-indexed
    double best;
};

std::vector<ConvergencePoint> best_so_far(const std::vector<double>& scores);

struct OptimumRound {
    std::size_t round;
    double score;
};

// Smallest round after which every additional round improves best-so-far by
// at most delta.
OptimumRound optimum_round(const std::vector<ConvergencePoint>&, double delta = 0.005);

}  // namespace greenopt
