#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace greenopt {

enum class Scale { uniform, log_uniform };

struct ParamSpec {
    std::string name;
    bool is_categorical = false;
    double lower = 0.0;
    double upper = 1.0;
    Scale scale = Scale::uniform;
    std::vector<std::string> labels;

    static ParamSpec continuous(std::string name, double lower, double upper,
                                Scale scale = Scale::uniform);
    static ParamSpec categorical(std::string name, std::vector<std::string> labels);
};

using ParamValue = std::variant<double, std::string>;

// Values are positional, aligned with the declaring SearchSpace's param order.
struct Configuration {
    std::vector<ParamValue> values;

    double number_at(std::size_t i) const;
    const std::string& label_at(std::size_t i) const;
    bool operator==(const Configuration&) const = default;
};

class SearchSpace {
public:
    SearchSpace() = default;
    explicit SearchSpace(std::vector<ParamSpec> params);

    std::size_t size() const { return params_.size(); }
    bool empty() const { return params_.empty(); }
    const ParamSpec& at(std::size_t i) const { return params_.at(i); }
    const std::vector<ParamSpec>& params() const { return params_; }
    std::size_t index_of(const std::string& name) const;

    // Throws std::invalid_argument describing the first violation, if any.
    void check(const Configuration&) const;

private:
    std::vector<ParamSpec> params_;
};

// The `resolution` values a single param contributes to a grid: equally
// spaced on the param's scale, endpoints included. Categorical params ignore
// the resolution and contribute every label.
std::vector<ParamValue> grid_values(const ParamSpec&, int resolution);

// Number of grid cells; saturates at SIZE_MAX on overflow.
std::size_t grid_size(const SearchSpace&, int resolution);

// Full Cartesian product in lexicographic order over the param order (the
// first declared param varies slowest).
std::vector<Configuration> grid_enumerate(const SearchSpace&, int resolution = 5);

Configuration sample_uniform(const SearchSpace&, std::mt19937_64& rng);

// Bijection onto the unit cube for continuous params (respecting scale);
// categorical params map to their bucket center (index + 0.5) / label_count.
std::vector<double> to_unit_vector(const SearchSpace&, const Configuration&);
Configuration from_unit_vector(const SearchSpace&, const std::vector<double>& unit);

}  // namespace greenopt
