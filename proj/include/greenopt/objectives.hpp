#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "greenopt/profiles.hpp"
#include "greenopt/search_space.hpp"

namespace greenopt {

enum class SyntheticFunction { lowdim, branin, hartmann6 };

SyntheticFunction synthetic_function_from_name(const std::string&);
std::string_view to_string(SyntheticFunction);

// active_dims selects the unit-cube coordinates the function actually reads;
// empty means the default for the function (lowdim: all, branin: first 2,
// hartmann6: first 6).
struct SyntheticSpec {
    SyntheticFunction function = SyntheticFunction::lowdim;
    std::vector<std::size_t> active_dims;
    double noise_sigma = 0.0;
};

struct SimTrainerSpec {
    ArchDescriptor arch;
    std::string dataset;
    std::optional<double> noise_sigma;  // nullopt: profile's per-cluster std
};

struct ExternalSpec {
    std::string command_template;  // {param} placeholders, run via sh
    std::string score_pattern = R"(score=([-+]?[0-9]+(?:\.[0-9]*)?(?:[eE][-+]?[0-9]+)?))";
    double timeout_s = 3600.0;
};

using ObjectiveSpec = std::variant<SyntheticSpec, SimTrainerSpec, ExternalSpec>;

struct EvalResult {
    double score;
    double duration_s;  // 0 for simulated objectives, wall time for external
};

class ExternalObjectiveError : public std::runtime_error {
public:
    ExternalObjectiveError(const std::string& what, std::string output, int exit_code,
                           bool timed_out)
        : std::runtime_error(what),
          output(std::move(output)),
          exit_code(exit_code),
          timed_out(timed_out) {}
    std::string output;
    int exit_code;
    bool timed_out;
};

// Pure value of a synthetic function at already-projected active coordinates.
double synthetic_value(SyntheticFunction, const std::vector<double>& active_coords);

// Validates and defaults the active dim selection against a space of `dims`
// dimensions.
std::vector<std::size_t> resolve_synthetic_dims(const SyntheticSpec&, std::size_t dims);

double sim_accuracy(const ArchDescriptor&, const AccuracyModel&, const SearchSpace&,
                    const Configuration&, std::optional<double> noise_sigma,
                    std::mt19937_64& rng);

EvalResult eval_objective(const ObjectiveSpec&, const SearchSpace&, const Configuration&,
                          const ProfileLibrary&, std::mt19937_64& rng);

}  // namespace greenopt
