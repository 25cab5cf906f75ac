#include "greenopt/plan.hpp"

#include <cstdlib>
#include <regex>
#include <set>
#include <sstream>

#include "greenopt/num_format.hpp"

namespace greenopt {

namespace {

const std::set<std::string> kStrategyKinds = {"grid", "random", "bayes"};

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string w;
    while (in >> w)
        out.push_back(w);
    return out;
}

void check_known_keys(const TextConfig& cfg, const std::string& section,
                      const std::set<std::string>& known) {
    for (const auto& key : cfg.keys(section))
        if (!known.count(key))
            throw ConfigError("unknown key '" + key + "' in [" + section + "]");
}

SearchSpace space_from_config(const TextConfig& cfg) {
    const auto names = cfg.get_list("space", "params");
    if (names.empty())
        throw ConfigError("missing [space] params");
    check_known_keys(cfg, "space", {"params"});
    std::vector<ParamSpec> params;
    params.reserve(names.size());
    for (const auto& name : names) {
        const std::string section = "space." + name;
        if (!cfg.has_section(section))
            throw ConfigError("missing section [" + section + "]");
        const std::string kind = cfg.get_or(section, "kind", "continuous");
        if (kind == "categorical") {
            check_known_keys(cfg, section, {"kind", "labels"});
            params.push_back(ParamSpec::categorical(name, cfg.get_list(section, "labels")));
        } else if (kind == "continuous") {
            check_known_keys(cfg, section, {"kind", "scale", "lower", "upper"});
            const std::string scale = cfg.get_or(section, "scale", "uniform");
            if (scale != "uniform" && scale != "log-uniform")
                throw ConfigError("[" + section + "] scale must be uniform or log-uniform");
            params.push_back(ParamSpec::continuous(
                name, cfg.require_double(section, "lower"), cfg.require_double(section, "upper"),
                scale == "log-uniform" ? Scale::log_uniform : Scale::uniform));
        } else {
            throw ConfigError("[" + section + "] kind must be continuous or categorical");
        }
    }
    try {
        return SearchSpace(std::move(params));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid [space]: ") + e.what());
    }
}

ArchDescriptor arch_from_config(const TextConfig& cfg, const std::string& section,
                                const ArchDescriptor& defaults) {
    ArchDescriptor arch = defaults;
    arch.conv_layers = static_cast<int>(cfg.get_int(section, "conv_layers", defaults.conv_layers));
    arch.linear_layers =
        static_cast<int>(cfg.get_int(section, "linear_layers", defaults.linear_layers));
    arch.relu_layers = static_cast<int>(cfg.get_int(section, "relu_layers", defaults.relu_layers));
    return arch;
}

ObjectiveSpec objective_from_config(const TextConfig& cfg) {
    const std::string kind = cfg.get_or("objective", "kind", "synthetic");
    if (kind == "synthetic") {
        check_known_keys(cfg, "objective", {"kind", "function", "active_dims", "noise_sigma"});
        SyntheticSpec spec;
        try {
            spec.function = synthetic_function_from_name(cfg.get_or("objective", "function", "lowdim"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        for (const auto& item : cfg.get_list("objective", "active_dims")) {
            try {
                const double v = parse_double(item);
                if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
                    throw std::runtime_error("");
                spec.active_dims.push_back(static_cast<std::size_t>(v));
            } catch (const std::exception&) {
                throw ConfigError("[objective] active_dims: bad index '" + item + "'");
            }
        }
        spec.noise_sigma = cfg.get_double("objective", "noise_sigma", 0.0);
        return spec;
    }
    if (kind == "sim_trainer") {
        check_known_keys(cfg, "objective", {"kind", "dataset", "noise_sigma", "conv_layers",
                                            "linear_layers", "relu_layers"});
        SimTrainerSpec spec;
        spec.dataset = cfg.require("objective", "dataset");
        spec.arch = arch_from_config(cfg, "objective", {});
        if (cfg.has("objective", "noise_sigma"))
            spec.noise_sigma = cfg.require_double("objective", "noise_sigma");
        return spec;
    }
    if (kind == "external") {
        check_known_keys(cfg, "objective", {"kind", "command", "score_pattern", "timeout_s"});
        ExternalSpec spec;
        spec.command_template = cfg.require("objective", "command");
        spec.score_pattern = cfg.get_or("objective", "score_pattern", spec.score_pattern);
        spec.timeout_s = cfg.get_double("objective", "timeout_s", spec.timeout_s);
        return spec;
    }
    throw ConfigError("[objective] kind must be synthetic, sim_trainer, or external");
}

EnergyPlan energy_from_config(const TextConfig& cfg, const ObjectiveSpec& objective) {
    const std::string mode = cfg.get_or("energy", "mode", "off");
    if (mode == "off") {
        check_known_keys(cfg, "energy", {"mode"});
        return EnergyOff{};
    }
    if (mode == "sampled") {
        check_known_keys(cfg, "energy", {"mode", "command", "replay", "interval_ms", "idle_watts"});
        EnergySampled e;
        const bool has_cmd = cfg.has("energy", "command");
        const bool has_replay = cfg.has("energy", "replay");
        if (has_cmd == has_replay)
            throw ConfigError("[energy] sampled needs exactly one of command/replay");
        if (has_cmd)
            e.source = PowerSourceCommand{split_ws(cfg.require("energy", "command"))};
        else
            e.source = PowerSourceReplay{cfg.require("energy", "replay")};
        e.interval_ms = static_cast<int>(cfg.get_int("energy", "interval_ms", 100));
        e.idle_watts = cfg.get_double("energy", "idle_watts", 0.0);
        return e;
    }
    if (mode == "simulated") {
        check_known_keys(cfg, "energy",
                         {"mode", "profile", "conv_layers", "linear_layers", "relu_layers"});
        EnergySimulated e;
        // The arch defaults to the sim_trainer objective's arch so experiment
        // files do not repeat the layer counts.
        ArchDescriptor defaults{};
        if (const auto* sim = std::get_if<SimTrainerSpec>(&objective)) {
            defaults = sim->arch;
            e.profile = cfg.get_or("energy", "profile", sim->dataset);
        } else {
            e.profile = cfg.require("energy", "profile");
        }
        e.arch = arch_from_config(cfg, "energy", defaults);
        return e;
    }
    throw ConfigError("[energy] mode must be off, sampled, or simulated");
}

}  // namespace

ExperimentPlan plan_from_config(const TextConfig& cfg) {
    for (const auto& section : cfg.section_names()) {
        if (section.empty() || section == "space" || section == "strategy" ||
            section == "objective" || section == "energy" || section == "run" ||
            section.rfind("space.", 0) == 0)
            continue;
        throw ConfigError("unknown section [" + section + "]");
    }
    check_known_keys(cfg, "", {"name"});
    check_known_keys(cfg, "strategy",
                     {"kind", "resolution", "candidates", "epsilon", "grid_cap"});
    check_known_keys(cfg, "run", {"rounds", "repetitions", "seed", "budget_cap", "profiles"});

    ExperimentPlan plan;
    // Value constructors (param specs, function names, ...) report bad
    // values as std::invalid_argument; at this boundary they are all
    // configuration mistakes, so surface them as such.
    try {
        plan.name = cfg.get_or("", "name", "experiment");
        plan.space = space_from_config(cfg);
        plan.strategy_kind = cfg.get_or("strategy", "kind", "random");
        plan.strategy.grid_resolution =
            static_cast<int>(cfg.get_int("strategy", "resolution", 5));
        plan.strategy.candidates_per_round =
            static_cast<int>(cfg.get_int("strategy", "candidates", 512));
        plan.strategy.pi_epsilon = cfg.get_double("strategy", "epsilon", 1e-9);
        plan.strategy.grid_cap =
            static_cast<std::size_t>(cfg.get_int("strategy", "grid_cap", 10'000'000));
        plan.objective = objective_from_config(cfg);
        plan.energy = energy_from_config(cfg, plan.objective);
        plan.rounds = static_cast<int>(cfg.get_int("run", "rounds", 64));
        plan.repetitions = static_cast<int>(cfg.get_int("run", "repetitions", 8));
        plan.seed = static_cast<std::uint64_t>(cfg.get_int("run", "seed", 0));
        plan.budget_cap =
            static_cast<std::uint64_t>(cfg.get_int("run", "budget_cap", 1'000'000));
        plan.profiles_path = cfg.get_or("run", "profiles", "");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return plan;
}

std::vector<std::string> validate_plan(const ExperimentPlan& plan) {
    std::vector<std::string> errors;
    auto err = [&errors](const std::string& e) { errors.push_back(e); };

    if (plan.name.empty() || plan.name.find_first_of("\t\n") != std::string::npos)
        err("name must be non-empty and contain no tabs or newlines");
    if (plan.space.empty())
        err("empty search space");
    if (!kStrategyKinds.count(plan.strategy_kind))
        err("unknown strategy '" + plan.strategy_kind + "'");
    if (plan.strategy.grid_resolution < 2)
        err("grid resolution must be >= 2");
    if (plan.strategy.candidates_per_round < 1)
        err("bayes candidates must be >= 1");
    if (plan.strategy.pi_epsilon < 0.0)
        err("bayes epsilon must be >= 0");
    if (plan.rounds < 1)
        err("rounds must be >= 1");
    if (plan.repetitions < 1)
        err("repetitions must be >= 1");
    const auto evals = static_cast<std::uint64_t>(plan.rounds) *
                       static_cast<std::uint64_t>(std::max(plan.repetitions, 0));
    if (plan.rounds >= 1 && plan.repetitions >= 1 && evals > plan.budget_cap)
        err("budget cap exceeded: rounds*repetitions = " + std::to_string(evals) + " > " +
            std::to_string(plan.budget_cap));

    if (plan.strategy_kind == "grid" && !plan.space.empty() &&
        plan.strategy.grid_resolution >= 2) {
        const std::size_t cells = grid_size(plan.space, plan.strategy.grid_resolution);
        if (cells > plan.strategy.grid_cap)
            err("grid too large: " + std::to_string(cells) + " configs exceeds cap " +
                std::to_string(plan.strategy.grid_cap));
        else if (static_cast<std::uint64_t>(plan.rounds) > cells)
            err("grid has only " + std::to_string(cells) + " configs for " +
                std::to_string(plan.rounds) + " rounds");
    }

    ProfileLibrary profiles;
    bool profiles_ok = true;
    try {
        profiles =
            plan.profiles_path.empty() ? ProfileLibrary::builtin()
                                       : ProfileLibrary::load(plan.profiles_path);
    } catch (const std::exception& e) {
        profiles_ok = false;
        err(e.what());
    }

    if (const auto* syn = std::get_if<SyntheticSpec>(&plan.objective)) {
        if (syn->noise_sigma < 0.0)
            err("objective noise_sigma must be >= 0");
        if (!plan.space.empty()) {
            try {
                resolve_synthetic_dims(*syn, plan.space.size());
            } catch (const std::invalid_argument& e) {
                err(e.what());
            }
        }
    } else if (const auto* sim = std::get_if<SimTrainerSpec>(&plan.objective)) {
        if (sim->arch.conv_layers < 1 || sim->arch.linear_layers < 1 || sim->arch.relu_layers < 0)
            err("invalid objective arch: conv >= 1, linear >= 1, relu >= 0 required");
        if (sim->noise_sigma && *sim->noise_sigma < 0.0)
            err("objective noise_sigma must be >= 0");
        if (profiles_ok && !profiles.accuracy.count(sim->dataset))
            err("unknown dataset profile '" + sim->dataset + "'");
    } else if (const auto* ext = std::get_if<ExternalSpec>(&plan.objective)) {
        if (ext->command_template.empty())
            err("external objective command must be non-empty");
        if (ext->timeout_s <= 0.0)
            err("external objective timeout must be positive");
        try {
            std::regex re(ext->score_pattern);
        } catch (const std::regex_error& e) {
            err("bad score_pattern: " + std::string(e.what()));
        }
    }

    if (const auto* sampled = std::get_if<EnergySampled>(&plan.energy)) {
        if (sampled->interval_ms < 1)
            err("energy interval_ms must be >= 1");
        if (sampled->idle_watts < 0.0)
            err("idle_watts must be >= 0");
        if (const auto* cmd = std::get_if<PowerSourceCommand>(&sampled->source)) {
            if (cmd->argv.empty())
                err("energy command must be non-empty");
        } else if (std::get<PowerSourceReplay>(sampled->source).path.empty()) {
            err("energy replay path must be non-empty");
        }
    } else if (const auto* simulated = std::get_if<EnergySimulated>(&plan.energy)) {
        if (simulated->arch.conv_layers < 1 || simulated->arch.linear_layers < 1 ||
            simulated->arch.relu_layers < 0)
            err("invalid energy arch: conv >= 1, linear >= 1, relu >= 0 required");
        if (profiles_ok && !profiles.energy.count(simulated->profile))
            err("unknown dataset profile '" + simulated->profile + "'");
    }
    return errors;
}

std::string plan_to_config_text(const ExperimentPlan& plan) {
    std::ostringstream out;
    out << "name = " << plan.name << "\n";
    out << "\n[space]\nparams =";
    for (std::size_t i = 0; i < plan.space.size(); ++i)
        out << (i == 0 ? " " : ", ") << plan.space.at(i).name;
    out << "\n";
    for (const auto& p : plan.space.params()) {
        out << "\n[space." << p.name << "]\n";
        if (p.is_categorical) {
            out << "kind = categorical\nlabels =";
            for (std::size_t i = 0; i < p.labels.size(); ++i)
                out << (i == 0 ? " " : ", ") << p.labels[i];
            out << "\n";
        } else {
            out << "kind = continuous\n";
            out << "scale = " << (p.scale == Scale::log_uniform ? "log-uniform" : "uniform")
                << "\n";
            out << "lower = " << format_double(p.lower) << "\n";
            out << "upper = " << format_double(p.upper) << "\n";
        }
    }

    out << "\n[strategy]\nkind = " << plan.strategy_kind << "\n";
    out << "resolution = " << plan.strategy.grid_resolution << "\n";
    out << "candidates = " << plan.strategy.candidates_per_round << "\n";
    out << "epsilon = " << format_double(plan.strategy.pi_epsilon) << "\n";
    out << "grid_cap = " << plan.strategy.grid_cap << "\n";

    out << "\n[objective]\n";
    if (const auto* syn = std::get_if<SyntheticSpec>(&plan.objective)) {
        out << "kind = synthetic\n";
        out << "function = " << to_string(syn->function) << "\n";
        if (!syn->active_dims.empty()) {
            out << "active_dims =";
            for (std::size_t i = 0; i < syn->active_dims.size(); ++i)
                out << (i == 0 ? " " : ", ") << syn->active_dims[i];
            out << "\n";
        }
        out << "noise_sigma = " << format_double(syn->noise_sigma) << "\n";
    } else if (const auto* sim = std::get_if<SimTrainerSpec>(&plan.objective)) {
        out << "kind = sim_trainer\n";
        out << "dataset = " << sim->dataset << "\n";
        out << "conv_layers = " << sim->arch.conv_layers << "\n";
        out << "linear_layers = " << sim->arch.linear_layers << "\n";
        out << "relu_layers = " << sim->arch.relu_layers << "\n";
        if (sim->noise_sigma)
            out << "noise_sigma = " << format_double(*sim->noise_sigma) << "\n";
    } else {
        const auto& ext = std::get<ExternalSpec>(plan.objective);
        out << "kind = external\n";
        out << "command = " << ext.command_template << "\n";
        out << "score_pattern = " << ext.score_pattern << "\n";
        out << "timeout_s = " << format_double(ext.timeout_s) << "\n";
    }

    out << "\n[energy]\n";
    if (std::holds_alternative<EnergyOff>(plan.energy)) {
        out << "mode = off\n";
    } else if (const auto* sampled = std::get_if<EnergySampled>(&plan.energy)) {
        out << "mode = sampled\n";
        if (const auto* cmd = std::get_if<PowerSourceCommand>(&sampled->source)) {
            out << "command =";
            for (const auto& a : cmd->argv)
                out << " " << a;
            out << "\n";
        } else {
            out << "replay = " << std::get<PowerSourceReplay>(sampled->source).path << "\n";
        }
        out << "interval_ms = " << sampled->interval_ms << "\n";
        out << "idle_watts = " << format_double(sampled->idle_watts) << "\n";
    } else {
        const auto& simulated = std::get<EnergySimulated>(plan.energy);
        out << "mode = simulated\n";
        out << "profile = " << simulated.profile << "\n";
        out << "conv_layers = " << simulated.arch.conv_layers << "\n";
        out << "linear_layers = " << simulated.arch.linear_layers << "\n";
        out << "relu_layers = " << simulated.arch.relu_layers << "\n";
    }

    out << "\n[run]\n";
    out << "rounds = " << plan.rounds << "\n";
    out << "repetitions = " << plan.repetitions << "\n";
    out << "seed = " << plan.seed << "\n";
    out << "budget_cap = " << plan.budget_cap << "\n";
    if (!plan.profiles_path.empty())
        out << "profiles = " << plan.profiles_path << "\n";
    return out.str();
}

void apply_power_command_override(ExperimentPlan& plan) {
    const char* env = std::getenv("GREENOPT_POWER_CMD");
    if (!env)
        return;
    if (auto* sampled = std::get_if<EnergySampled>(&plan.energy)) {
        const auto argv = split_ws(env);
        if (argv.empty())
            throw ConfigError("GREENOPT_POWER_CMD is set but empty");
        sampled->source = PowerSourceCommand{argv};
    }
}

}  // namespace greenopt
