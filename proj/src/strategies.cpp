#include "greenopt/strategies.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "greenopt/rng.hpp"

namespace greenopt {

double pi_score(double mu, double sigma, double best, double epsilon, Direction dir) {
    if (!std::isfinite(mu) || !std::isfinite(best))
        throw std::invalid_argument("pi_score requires finite mu and best");
    if (sigma < 0.0 || epsilon < 0.0)
        throw std::invalid_argument("pi_score requires sigma >= 0 and epsilon >= 0");
    const double num = dir == Direction::maximise ? mu - best : best - mu;
    const double denom = sigma + epsilon;
    if (denom == 0.0) {
        if (num > 0.0)
            return 1.0;
        if (num < 0.0)
            return 0.0;
        return 0.5;
    }
    return std_normal_cdf(num / denom);
}

namespace {

void check_score(double score) {
    if (!std::isfinite(score))
        throw std::invalid_argument("observed score must be finite");
}

class GridStrategy final : public Strategy {
public:
    GridStrategy(const SearchSpace& space, std::uint64_t seed, const StrategyOptions& opt)
        : space_(space) {
        if (space.empty())
            throw std::invalid_argument("empty search space");
        const std::size_t total = grid_size(space, opt.grid_resolution);
        if (total > opt.grid_cap)
            throw std::runtime_error("grid too large: " + std::to_string(total) +
                                     " configs exceeds cap " + std::to_string(opt.grid_cap));
        deck_ = grid_enumerate(space, opt.grid_resolution);
        auto rng = derive_rng(seed, {0x67726964});
        // Fisher-Yates; std::shuffle's draw pattern is not pinned by the
        // standard, and seeded reruns must deal identically.
        for (std::size_t i = deck_.size(); i > 1; --i) {
            const std::size_t j = uniform_index(rng, i);
            std::swap(deck_[i - 1], deck_[j]);
        }
    }

    Configuration next_config() override {
        if (cursor_ >= deck_.size())
            throw std::runtime_error("grid exhausted after " + std::to_string(deck_.size()) +
                                     " configs");
        return deck_[cursor_++];
    }

    void observe(const Configuration& config, double score) override {
        space_.check(config);
        check_score(score);
    }

    std::string_view kind() const override { return "grid"; }

private:
    SearchSpace space_;
    std::vector<Configuration> deck_;
    std::size_t cursor_ = 0;
};

class RandomStrategy final : public Strategy {
public:
    RandomStrategy(const SearchSpace& space, std::uint64_t seed)
        : space_(space), rng_(derive_rng(seed, {0x726e64})) {
        if (space.empty())
            throw std::invalid_argument("empty search space");
    }

    Configuration next_config() override { return sample_uniform(space_, rng_); }

    void observe(const Configuration& config, double score) override {
        space_.check(config);
        check_score(score);
    }

    std::string_view kind() const override { return "random"; }

private:
    SearchSpace space_;
    std::mt19937_64 rng_;
};

class BayesStrategy final : public Strategy {
public:
    BayesStrategy(const SearchSpace& space, std::uint64_t seed, const StrategyOptions& opt)
        : space_(space), options_(opt), rng_(derive_rng(seed, {0x62617965})) {
        if (space.empty())
            throw std::invalid_argument("empty search space");
        if (opt.candidates_per_round < 1)
            throw std::invalid_argument("candidates_per_round must be >= 1");
    }

    Configuration next_config() override {
        return propose_bayes(space_, history_, options_, rng_);
    }

    void observe(const Configuration& config, double score) override {
        space_.check(config);
        check_score(score);
        history_.emplace_back(config, score);
    }

    std::string_view kind() const override { return "bayes"; }

private:
    SearchSpace space_;
    StrategyOptions options_;
    std::mt19937_64 rng_;
    std::vector<std::pair<Configuration, double>> history_;
};

}  // namespace

Configuration propose_bayes(const SearchSpace& space,
                            const std::vector<std::pair<Configuration, double>>& history,
                            const StrategyOptions& options, std::mt19937_64& rng) {
    if (history.empty())
        return sample_uniform(space, rng);

    std::vector<std::vector<double>> points;
    std::vector<double> scores;
    points.reserve(history.size());
    scores.reserve(history.size());
    double best = history.front().second;
    for (const auto& [config, score] : history) {
        points.push_back(to_unit_vector(space, config));
        scores.push_back(score);
        if (options.direction == Direction::maximise ? score > best : score < best)
            best = score;
    }
    const GpModel model = gp_fit(points, scores, options.kernel);

    Configuration winner;
    double winner_pi = -1.0;
    for (int i = 0; i < options.candidates_per_round; ++i) {
        Configuration candidate = sample_uniform(space, rng);
        const GpPrediction pred = gp_predict(model, to_unit_vector(space, candidate));
        const double pi =
            pi_score(pred.mean, pred.sigma, best, options.pi_epsilon, options.direction);
        if (pi > winner_pi) {  // strict: ties keep the first encountered
            winner_pi = pi;
            winner = std::move(candidate);
        }
    }
    return winner;
}

std::unique_ptr<Strategy> make_strategy(std::string_view kind, const SearchSpace& space,
                                        std::uint64_t seed, StrategyOptions options) {
    if (kind == "grid")
        return std::make_unique<GridStrategy>(space, seed, options);
    if (kind == "random")
        return std::make_unique<RandomStrategy>(space, seed);
    if (kind == "bayes")
        return std::make_unique<BayesStrategy>(space, seed, options);
    throw std::invalid_argument("unknown strategy '" + std::string(kind) + "'");
}

}  // namespace greenopt
