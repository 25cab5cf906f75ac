#include "greenopt/objectives.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <regex>
#include <set>

#include "greenopt/num_format.hpp"
#include "greenopt/rng.hpp"
#include "greenopt/subprocess.hpp"

namespace greenopt {

SyntheticFunction synthetic_function_from_name(const std::string& name) {
    if (name == "lowdim")
        return SyntheticFunction::lowdim;
    if (name == "branin")
        return SyntheticFunction::branin;
    if (name == "hartmann6")
        return SyntheticFunction::hartmann6;
    throw std::invalid_argument("unknown synthetic function '" + name + "'");
}

std::string_view to_string(SyntheticFunction f) {
    switch (f) {
        case SyntheticFunction::lowdim: return "lowdim";
        case SyntheticFunction::branin: return "branin";
        case SyntheticFunction::hartmann6: return "hartmann6";
    }
    return "?";
}

namespace {

constexpr double kPi = std::numbers::pi;

double lowdim_value(const std::vector<double>& z) {
    double q = 0.0;
    for (double v : z)
        q += (v - 0.7) * (v - 0.7);
    return std::exp(-q / 0.08);
}

double branin_raw(double x, double y) {
    const double b = 5.1 / (4.0 * kPi * kPi);
    const double c = 5.0 / kPi;
    const double t = 1.0 / (8.0 * kPi);
    const double inner = y - b * x * x + c * x - 6.0;
    return inner * inner + 10.0 * (1.0 - t) * std::cos(x) + 10.0;
}

// Minimum of the Branin function; attained exactly at (pi, 2.275).
const double kBraninMin = 10.0 / (8.0 * kPi);

double branin_value(const std::vector<double>& z) {
    const double x = 15.0 * z[0] - 5.0;
    const double y = 15.0 * z[1];
    return std::exp(-(branin_raw(x, y) - kBraninMin) / 50.0);
}

// Published global minimum of the 6-d Hartmann function.
constexpr double kHartmann6Min = -3.32237;

double hartmann6_raw(const std::vector<double>& z) {
    static const double alpha[4] = {1.0, 1.2, 3.0, 3.2};
    static const double a[4][6] = {
        {10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
        {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
        {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
        {17.0, 8.0, 0.05, 10.0, 0.1, 14.0},
    };
    static const double p[4][6] = {
        {0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
        {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
        {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
        {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381},
    };
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        double q = 0.0;
        for (int j = 0; j < 6; ++j)
            q += a[i][j] * (z[j] - p[i][j]) * (z[j] - p[i][j]);
        sum += alpha[i] * std::exp(-q);
    }
    return -sum;
}

double hartmann6_value(const std::vector<double>& z) {
    return std::exp(-(hartmann6_raw(z) - kHartmann6Min));
}

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

// Saturating blend anchored at conv = 1 and conv = 4; each added conv layer
// contributes half the previous increment.
double conv_blend(double v1, double v4, int conv) {
    const double t = (1.0 - std::pow(0.5, conv - 1)) / 0.875;
    return v1 + (v4 - v1) * t;
}

std::string substitute_placeholders(const std::string& tmpl, const SearchSpace& space,
                                    const Configuration& config) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        const char ch = tmpl[i];
        if (ch != '{') {
            out += ch;
            ++i;
            continue;
        }
        const auto close = tmpl.find('}', i);
        if (close == std::string::npos)
            throw std::invalid_argument("unmatched '{' in command template");
        const std::string name = tmpl.substr(i + 1, close - i - 1);
        const std::size_t idx = space.index_of(name);  // throws on unknown names
        if (space.at(idx).is_categorical)
            out += config.label_at(idx);
        else
            out += format_double(config.number_at(idx));
        i = close + 1;
    }
    return out;
}

EvalResult eval_external(const ExternalSpec& spec, const SearchSpace& space,
                         const Configuration& config) {
    const std::string command = substitute_placeholders(spec.command_template, space, config);
    const auto start = std::chrono::steady_clock::now();
    const CommandResult r = run_shell(command, spec.timeout_s);
    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (r.timed_out)
        throw ExternalObjectiveError("external objective timed out after " +
                                         format_double(spec.timeout_s) + "s",
                                     r.output, r.exit_code, true);
    if (r.exit_code != 0)
        throw ExternalObjectiveError(
            "external objective exited with code " + std::to_string(r.exit_code), r.output,
            r.exit_code, false);

    std::regex re;
    try {
        re = std::regex(spec.score_pattern);
    } catch (const std::regex_error& e) {
        throw std::invalid_argument("bad score_pattern: " + std::string(e.what()));
    }
    std::smatch last;
    for (auto it = std::sregex_iterator(r.output.begin(), r.output.end(), re);
         it != std::sregex_iterator(); ++it)
        last = *it;
    if (last.empty())
        throw ExternalObjectiveError("no score found in output", r.output, r.exit_code, false);
    const std::string text = last.size() > 1 && last[1].matched ? last[1].str() : last[0].str();
    char* end = nullptr;
    const double score = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || !std::isfinite(score))
        throw ExternalObjectiveError("could not parse score '" + text + "'", r.output,
                                     r.exit_code, false);
    return {score, duration};
}

}  // namespace

std::vector<std::size_t> resolve_synthetic_dims(const SyntheticSpec& spec, std::size_t dims) {
    std::vector<std::size_t> active = spec.active_dims;
    if (active.empty()) {
        std::size_t want = dims;
        if (spec.function == SyntheticFunction::branin)
            want = 2;
        else if (spec.function == SyntheticFunction::hartmann6)
            want = 6;
        if (want > dims)
            throw std::invalid_argument("search space has too few dims for " +
                                        std::string(to_string(spec.function)));
        for (std::size_t i = 0; i < want; ++i)
            active.push_back(i);
        return active;
    }
    std::set<std::size_t> seen;
    for (std::size_t i : active) {
        if (i >= dims)
            throw std::invalid_argument("active dim out of range");
        if (!seen.insert(i).second)
            throw std::invalid_argument("duplicate active dim");
    }
    if (spec.function == SyntheticFunction::branin && active.size() != 2)
        throw std::invalid_argument("branin needs exactly 2 active dims");
    if (spec.function == SyntheticFunction::hartmann6 && active.size() != 6)
        throw std::invalid_argument("hartmann6 needs exactly 6 active dims");
    return active;
}

double synthetic_value(SyntheticFunction fn, const std::vector<double>& active_coords) {
    for (double v : active_coords)
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("synthetic coordinates must lie in [0, 1]");
    switch (fn) {
        case SyntheticFunction::lowdim:
            if (active_coords.empty())
                throw std::invalid_argument("lowdim needs at least one active dim");
            return lowdim_value(active_coords);
        case SyntheticFunction::branin:
            if (active_coords.size() != 2)
                throw std::invalid_argument("branin needs exactly 2 active dims");
            return branin_value(active_coords);
        case SyntheticFunction::hartmann6:
            if (active_coords.size() != 6)
                throw std::invalid_argument("hartmann6 needs exactly 6 active dims");
            return hartmann6_value(active_coords);
    }
    throw std::invalid_argument("unknown synthetic function");
}

double sim_accuracy(const ArchDescriptor& arch, const AccuracyModel& model,
                    const SearchSpace& space, const Configuration& config,
                    std::optional<double> noise_sigma, std::mt19937_64& rng) {
    if (arch.conv_layers < 1 || arch.linear_layers < 1 || arch.relu_layers < 0)
        throw std::invalid_argument("invalid arch: conv >= 1, linear >= 1, relu >= 0 required");
    const std::vector<double> u = to_unit_vector(space, config);
    double d2 = 0.0;
    for (double v : u)
        d2 += (v - model.optimum_coord) * (v - model.optimum_coord);
    const double tune =
        model.tune_floor + (1.0 - model.tune_floor) * std::exp(-d2 / model.tune_width);
    const double cap = conv_blend(model.acc_conv1, model.acc_conv4, arch.conv_layers);
    double score = cap * tune;
    const double sigma =
        noise_sigma ? *noise_sigma : conv_blend(model.std_conv1, model.std_conv4, arch.conv_layers);
    if (sigma < 0.0)
        throw std::invalid_argument("noise sigma must be >= 0");
    if (sigma > 0.0)
        score += sigma * normal(rng);
    return clamp_unit(score);
}

EvalResult eval_objective(const ObjectiveSpec& spec, const SearchSpace& space,
                          const Configuration& config, const ProfileLibrary& profiles,
                          std::mt19937_64& rng) {
    if (const auto* syn = std::get_if<SyntheticSpec>(&spec)) {
        if (syn->noise_sigma < 0.0)
            throw std::invalid_argument("noise sigma must be >= 0");
        const std::vector<double> u = to_unit_vector(space, config);
        const auto active = resolve_synthetic_dims(*syn, u.size());
        std::vector<double> z;
        z.reserve(active.size());
        for (std::size_t i : active)
            z.push_back(u[i]);
        double score = synthetic_value(syn->function, z);
        if (syn->noise_sigma > 0.0)
            score += syn->noise_sigma * normal(rng);
        return {clamp_unit(score), 0.0};
    }
    if (const auto* sim = std::get_if<SimTrainerSpec>(&spec)) {
        const AccuracyModel& model = profiles.accuracy_model(sim->dataset);
        return {sim_accuracy(sim->arch, model, space, config, sim->noise_sigma, rng), 0.0};
    }
    return eval_external(std::get<ExternalSpec>(spec), space, config);
}

}  // namespace greenopt
