#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "greenopt/config_file.hpp"
#include "greenopt/energy.hpp"
#include "greenopt/objectives.hpp"
#include "greenopt/strategies.hpp"

namespace greenopt {

struct EnergyOff {};

struct EnergySampled {
    PowerSource source;
    int interval_ms = 100;
    double idle_watts = 0.0;
};

struct EnergySimulated {
    ArchDescriptor arch;
    std::string profile;
};

using EnergyPlan = std::variant<EnergyOff, EnergySampled, EnergySimulated>;

struct ExperimentPlan {
    std::string name;
    SearchSpace space;
    std::string strategy_kind = "random";
    StrategyOptions strategy;
    ObjectiveSpec objective = SyntheticSpec{};
    EnergyPlan energy = EnergyOff{};
    int rounds = 64;
    int repetitions = 8;
    std::uint64_t seed = 0;
    std::uint64_t budget_cap = 1'000'000;
    std::string profiles_path;  // optional override of builtin profiles
};

// Throws ConfigError on malformed structure or unparseable values.
ExperimentPlan plan_from_config(const TextConfig&);

// Semantic checks; returns human-readable problems (empty when valid).
std::vector<std::string> validate_plan(const ExperimentPlan&);

// Canonical, deterministic serialization in the config format. Parsing it
// back yields an equal plan; embedded in results logs as the plan snapshot.
std::string plan_to_config_text(const ExperimentPlan&);

// GREENOPT_POWER_CMD, when set, replaces a sampled plan's probe command.
void apply_power_command_override(ExperimentPlan&);

}  // namespace greenopt
