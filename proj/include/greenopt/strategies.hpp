#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "greenopt/gp.hpp"
#include "greenopt/search_space.hpp"

namespace greenopt {

enum class Direction { maximise, minimise };

struct StrategyOptions {
    int grid_resolution = 5;
    std::size_t grid_cap = 10'000'000;
    int candidates_per_round = 512;
    double pi_epsilon = 1e-9;
    Direction direction = Direction::maximise;
    KernelConfig kernel{};
};

// Probability of improvement over `best` for a Gaussian belief N(mu, sigma).
// The limit sigma + epsilon = 0 resolves by the sign of the improvement.
double pi_score(double mu, double sigma, double best, double epsilon, Direction);

class Strategy {
public:
    virtual ~Strategy() = default;
    virtual Configuration next_config() = 0;
    virtual void observe(const Configuration&, double score) = 0;
    virtual std::string_view kind() const = 0;
};

// kind: "grid" | "random" | "bayes". Grid enumerates the full grid up front,
// shuffles it once with the seed, and deals configs until exhausted.
std::unique_ptr<Strategy> make_strategy(std::string_view kind, const SearchSpace&,
                                        std::uint64_t seed, StrategyOptions options = {});

// One acquisition step over an explicit history: fit a GP on the history,
// draw candidates_per_round uniform candidates from rng, return the first
// candidate attaining the maximal PI. An empty history proposes uniformly.
Configuration propose_bayes(const SearchSpace&,
                            const std::vector<std::pair<Configuration, double>>& history,
                            const StrategyOptions&, std::mt19937_64& rng);

}  // namespace greenopt
