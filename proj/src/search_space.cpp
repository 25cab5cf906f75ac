#include "greenopt/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "greenopt/rng.hpp"

namespace greenopt {

namespace {

void validate_spec(const ParamSpec& p) {
    if (p.name.empty())
        throw std::invalid_argument("param name must not be empty");
    if (p.is_categorical) {
        if (p.labels.empty())
            throw std::invalid_argument("categorical param '" + p.name + "' has no labels");
        std::set<std::string> seen(p.labels.begin(), p.labels.end());
        if (seen.size() != p.labels.size())
            throw std::invalid_argument("categorical param '" + p.name + "' has duplicate labels");
        return;
    }
    if (!std::isfinite(p.lower) || !std::isfinite(p.upper))
        throw std::invalid_argument("param '" + p.name + "' has non-finite bounds");
    if (!(p.lower < p.upper))
        throw std::invalid_argument("param '" + p.name + "': lower must be < upper");
    if (p.scale == Scale::log_uniform && !(p.lower > 0.0))
        throw std::invalid_argument("param '" + p.name + "': log-uniform requires lower > 0");
}

std::size_t label_index(const ParamSpec& p, const std::string& label) {
    auto it = std::find(p.labels.begin(), p.labels.end(), label);
    if (it == p.labels.end())
        throw std::invalid_argument("param '" + p.name + "': unknown label '" + label + "'");
    return static_cast<std::size_t>(it - p.labels.begin());
}

}  // namespace

ParamSpec ParamSpec::continuous(std::string name, double lower, double upper, Scale scale) {
    ParamSpec p;
    p.name = std::move(name);
    p.lower = lower;
    p.upper = upper;
    p.scale = scale;
    validate_spec(p);
    return p;
}

ParamSpec ParamSpec::categorical(std::string name, std::vector<std::string> labels) {
    ParamSpec p;
    p.name = std::move(name);
    p.is_categorical = true;
    p.labels = std::move(labels);
    validate_spec(p);
    return p;
}

double Configuration::number_at(std::size_t i) const {
    const auto* v = std::get_if<double>(&values.at(i));
    if (!v)
        throw std::invalid_argument("configuration value is not numeric");
    return *v;
}

const std::string& Configuration::label_at(std::size_t i) const {
    const auto* v = std::get_if<std::string>(&values.at(i));
    if (!v)
        throw std::invalid_argument("configuration value is not a label");
    return *v;
}

SearchSpace::SearchSpace(std::vector<ParamSpec> params) : params_(std::move(params)) {
    std::set<std::string> names;
    for (const auto& p : params_) {
        validate_spec(p);
        if (!names.insert(p.name).second)
            throw std::invalid_argument("duplicate param name '" + p.name + "'");
    }
}

std::size_t SearchSpace::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < params_.size(); ++i)
        if (params_[i].name == name)
            return i;
    throw std::invalid_argument("unknown param '" + name + "'");
}

void SearchSpace::check(const Configuration& c) const {
    if (c.values.size() != params_.size())
        throw std::invalid_argument("configuration has wrong arity");
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const auto& p = params_[i];
        if (p.is_categorical) {
            label_index(p, c.label_at(i));
        } else {
            const double v = c.number_at(i);
            if (!std::isfinite(v) || v < p.lower || v > p.upper)
                throw std::invalid_argument("param '" + p.name + "' value out of bounds");
        }
    }
}

std::vector<ParamValue> grid_values(const ParamSpec& p, int resolution) {
    if (p.is_categorical) {
        std::vector<ParamValue> out;
        for (const auto& l : p.labels)
            out.emplace_back(l);
        return out;
    }
    if (resolution < 2)
        throw std::invalid_argument("grid resolution must be >= 2");
    std::vector<ParamValue> out;
    out.reserve(static_cast<std::size_t>(resolution));
    for (int i = 0; i < resolution; ++i) {
        if (i == 0) {
            out.emplace_back(p.lower);
        } else if (i == resolution - 1) {
            out.emplace_back(p.upper);
        } else {
            const double t = static_cast<double>(i) / (resolution - 1);
            if (p.scale == Scale::log_uniform)
                out.emplace_back(p.lower * std::pow(p.upper / p.lower, t));
            else
                out.emplace_back(p.lower + t * (p.upper - p.lower));
        }
    }
    return out;
}

std::size_t grid_size(const SearchSpace& space, int resolution) {
    if (resolution < 2)
        throw std::invalid_argument("grid resolution must be >= 2");
    std::size_t total = 1;
    for (const auto& p : space.params()) {
        const std::size_t n = p.is_categorical ? p.labels.size()
                                               : static_cast<std::size_t>(resolution);
        if (total > std::numeric_limits<std::size_t>::max() / n)
            return std::numeric_limits<std::size_t>::max();
        total *= n;
    }
    return total;
}

std::vector<Configuration> grid_enumerate(const SearchSpace& space, int resolution) {
    if (space.empty())
        throw std::invalid_argument("empty search space");
    std::vector<std::vector<ParamValue>> axes;
    axes.reserve(space.size());
    for (const auto& p : space.params())
        axes.push_back(grid_values(p, resolution));

    std::vector<Configuration> out;
    out.reserve(grid_size(space, resolution));
    std::vector<std::size_t> idx(space.size(), 0);
    while (true) {
        Configuration c;
        c.values.reserve(space.size());
        for (std::size_t i = 0; i < space.size(); ++i)
            c.values.push_back(axes[i][idx[i]]);
        out.push_back(std::move(c));
        // odometer: last param varies fastest
        std::size_t i = space.size();
        while (i > 0) {
            --i;
            if (++idx[i] < axes[i].size())
                break;
            idx[i] = 0;
            if (i == 0)
                return out;
        }
    }
}

Configuration sample_uniform(const SearchSpace& space, std::mt19937_64& rng) {
    if (space.empty())
        throw std::invalid_argument("empty search space");
    Configuration c;
    c.values.reserve(space.size());
    for (const auto& p : space.params()) {
        if (p.is_categorical) {
            c.values.emplace_back(p.labels[uniform_index(rng, p.labels.size())]);
        } else if (p.scale == Scale::log_uniform) {
            const double u = uniform_unit(rng);
            c.values.emplace_back(p.lower * std::pow(p.upper / p.lower, u));
        } else {
            c.values.emplace_back(uniform_real(rng, p.lower, p.upper));
        }
    }
    return c;
}

std::vector<double> to_unit_vector(const SearchSpace& space, const Configuration& c) {
    space.check(c);
    std::vector<double> u;
    u.reserve(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        const auto& p = space.at(i);
        if (p.is_categorical) {
            const double idx = static_cast<double>(label_index(p, c.label_at(i)));
            u.push_back((idx + 0.5) / static_cast<double>(p.labels.size()));
        } else if (p.scale == Scale::log_uniform) {
            u.push_back(std::log(c.number_at(i) / p.lower) / std::log(p.upper / p.lower));
        } else {
            u.push_back((c.number_at(i) - p.lower) / (p.upper - p.lower));
        }
    }
    return u;
}

Configuration from_unit_vector(const SearchSpace& space, const std::vector<double>& unit) {
    if (unit.size() != space.size())
        throw std::invalid_argument("unit vector has wrong arity");
    Configuration c;
    c.values.reserve(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double u = unit[i];
        if (!(u >= 0.0 && u <= 1.0))
            throw std::invalid_argument("unit vector component outside [0, 1]");
        const auto& p = space.at(i);
        if (p.is_categorical) {
            const auto n = p.labels.size();
            auto idx = static_cast<std::size_t>(u * static_cast<double>(n));
            if (idx >= n)
                idx = n - 1;
            c.values.emplace_back(p.labels[idx]);
        } else if (p.scale == Scale::log_uniform) {
            c.values.emplace_back(u == 0.0   ? p.lower
                                  : u == 1.0 ? p.upper
                                             : p.lower * std::pow(p.upper / p.lower, u));
        } else {
            c.values.emplace_back(u == 1.0 ? p.upper : p.lower + u * (p.upper - p.lower));
        }
    }
    return c;
}

}  // namespace greenopt
