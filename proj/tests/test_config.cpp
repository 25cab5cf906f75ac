#include <doctest.h>

#include <cstdlib>
#include <string>
#include <vector>

#include "greenopt/config_file.hpp"
#include "greenopt/plan.hpp"

using namespace greenopt;

namespace {

const char* kFullPlanText = R"(name = demo
[space]
params = lr, depth, opt
[space.lr]
kind = continuous
scale = log-uniform
lower = 1e-5
upper = 1e-1
[space.depth]
kind = continuous
lower = 1
upper = 9
[space.opt]
kind = categorical
labels = sgd, adam
[strategy]
kind = bayes
candidates = 32
[objective]
kind = synthetic
function = lowdim
noise_sigma = 0.01
[energy]
mode = simulated
profile = fashionmnist
conv_layers = 2
[run]
rounds = 4
repetitions = 2
seed = 9
)";

ExperimentPlan parse_plan(const std::string& text) {
    return plan_from_config(TextConfig::parse_string(text, "test.cfg"));
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("the parser keeps sections, keys, comments, and order straight") {
    const TextConfig cfg = TextConfig::parse_string(
        "top = 1\n"
        "# comment\n"
        "; also a comment\n"
        "\n"
        "[alpha]\n"
        "  key = spaced value  \n"
        "other=2\n"
        "[beta.sub]\n"
        "key = 3\n",
        "demo.cfg");
    CHECK(cfg.get("", "top") == "1");
    CHECK(cfg.get("alpha", "key") == "spaced value");
    CHECK(cfg.get("alpha", "other") == "2");
    CHECK(cfg.has_section("beta.sub"));
    CHECK_FALSE(cfg.has_section("beta"));
    CHECK_FALSE(cfg.has("alpha", "missing"));
    CHECK(cfg.get_or("alpha", "missing", "fallback") == "fallback");
    CHECK(cfg.section_names() == std::vector<std::string>{"", "alpha", "beta.sub"});
    CHECK(cfg.keys("alpha") == std::vector<std::string>{"key", "other"});
}

TEST_CASE("parse errors carry the origin and line number") {
    CHECK_THROWS_WITH_AS(TextConfig::parse_string("just words\n", "f.cfg"),
                         "f.cfg:1: expected 'key = value'", ConfigError);
    CHECK_THROWS_WITH_AS(TextConfig::parse_string("[unterminated\n", "f.cfg"),
                         "f.cfg:1: unterminated section header", ConfigError);
    CHECK_THROWS_WITH_AS(TextConfig::parse_string("[]\n", "f.cfg"), "f.cfg:1: empty section name",
                         ConfigError);
    CHECK_THROWS_WITH_AS(TextConfig::parse_string("= 5\n", "f.cfg"), "f.cfg:1: empty key",
                         ConfigError);
    CHECK_THROWS_WITH_AS(TextConfig::parse_string("a = 1\na = 2\n", "f.cfg"),
                         "f.cfg:2: duplicate key 'a'", ConfigError);
}

TEST_CASE("typed getters validate their values") {
    const TextConfig cfg = TextConfig::parse_string(
        "[s]\nnum = 2.5\nint = 42\nbad = x1\nlist = a, b , c\nempties = a,,b\n", "t.cfg");
    CHECK(cfg.require_double("s", "num") == 2.5);
    CHECK(cfg.require_int("s", "int") == 42);
    CHECK(cfg.get_double("s", "missing", 7.0) == 7.0);
    CHECK(cfg.get_int("s", "missing", -3) == -3);
    CHECK_THROWS_WITH_AS(cfg.require("s", "missing"), "t.cfg: missing [s] missing", ConfigError);
    CHECK_THROWS_WITH_AS(cfg.require_double("s", "bad"), "t.cfg: [s] bad: bad number 'x1'",
                         ConfigError);
    CHECK_THROWS_WITH_AS(cfg.require_int("s", "num"), "t.cfg: [s] num: bad integer '2.5'",
                         ConfigError);
    CHECK(cfg.get_list("s", "list") == std::vector<std::string>{"a", "b", "c"});
    CHECK(cfg.get_list("s", "empties") == std::vector<std::string>{"a", "b"});
    CHECK(cfg.get_list("s", "missing").empty());
}

TEST_CASE("a full plan parses with defaults applied") {
    const ExperimentPlan plan = parse_plan(kFullPlanText);
    CHECK(plan.name == "demo");
    REQUIRE(plan.space.size() == 3);
    CHECK(plan.space.at(0).name == "lr");
    CHECK(plan.space.at(0).scale == Scale::log_uniform);
    CHECK(plan.space.at(1).scale == Scale::uniform);
    CHECK(plan.space.at(2).is_categorical);
    CHECK(plan.strategy_kind == "bayes");
    CHECK(plan.strategy.candidates_per_round == 32);
    CHECK(plan.strategy.grid_resolution == 5);
    CHECK(plan.strategy.pi_epsilon == 1e-9);
    CHECK(plan.strategy.grid_cap == 10'000'000);

    const auto& syn = std::get<SyntheticSpec>(plan.objective);
    CHECK(syn.function == SyntheticFunction::lowdim);
    CHECK(syn.noise_sigma == 0.01);

    const auto& sim = std::get<EnergySimulated>(plan.energy);
    CHECK(sim.profile == "fashionmnist");
    CHECK(sim.arch.conv_layers == 2);
    CHECK(sim.arch.linear_layers == 3);

    CHECK(plan.rounds == 4);
    CHECK(plan.repetitions == 2);
    CHECK(plan.seed == 9);
    CHECK(plan.budget_cap == 1'000'000);
    CHECK(validate_plan(plan).empty());
}

TEST_CASE("a minimal plan falls back to documented defaults") {
    const ExperimentPlan plan = parse_plan(
        "[space]\nparams = x\n[space.x]\nlower = 0\nupper = 1\n");
    CHECK(plan.name == "experiment");
    CHECK(plan.strategy_kind == "random");
    CHECK(plan.rounds == 64);
    CHECK(plan.repetitions == 8);
    CHECK(plan.seed == 0);
    CHECK(std::holds_alternative<SyntheticSpec>(plan.objective));
    CHECK(std::holds_alternative<EnergyOff>(plan.energy));
    CHECK(validate_plan(plan).empty());
}

TEST_CASE("unknown sections and keys are rejected rather than ignored") {
    CHECK_THROWS_WITH_AS(parse_plan("[space]\nparams = x\n[space.x]\nlower = 0\nupper = 1\n"
                                    "[extras]\nk = 1\n"),
                         "unknown section [extras]", ConfigError);
    CHECK_THROWS_WITH_AS(parse_plan("[space]\nparams = x\n[space.x]\nlower = 0\nupper = 1\n"
                                    "[strategy]\nkindd = grid\n"),
                         "unknown key 'kindd' in [strategy]", ConfigError);
    CHECK_THROWS_WITH_AS(parse_plan("[space]\nparams = x\n[space.x]\nlower = 0\nupper = 1\n"
                                    "typo = 1\n"),
                         "unknown key 'typo' in [space.x]", ConfigError);
}

TEST_CASE("structural plan errors are specific") {
    CHECK_THROWS_WITH_AS(parse_plan("name = x\n"), "missing [space] params", ConfigError);
    CHECK_THROWS_WITH_AS(parse_plan("[space]\nparams = x\n"), "missing section [space.x]",
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_plan("[space]\nparams = x\n[space.x]\nkind = fuzzy\n"),
                         "[space.x] kind must be continuous or categorical", ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_plan("[space]\nparams = x\n[space.x]\nscale = cubic\nlower = 0\nupper = 1\n"),
        "[space.x] scale must be uniform or log-uniform", ConfigError);
    CHECK_THROWS_WITH_AS(parse_plan("[space]\nparams = x\n[space.x]\nlower = 0\nupper = 1\n"
                                    "[objective]\nkind = quantum\n"),
                         "[objective] kind must be synthetic, sim_trainer, or external",
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_plan("[space]\nparams = x\n[space.x]\nlower = 0\nupper = 1\n"
                                    "[objective]\nactive_dims = 1.5\n"),
                         "[objective] active_dims: bad index '1.5'", ConfigError);
    CHECK_THROWS_WITH_AS(parse_plan("[space]\nparams = x\n[space.x]\nlower = 0\nupper = 1\n"
                                    "[energy]\nmode = psychic\n"),
                         "[energy] mode must be off, sampled, or simulated", ConfigError);
    CHECK_THROWS_WITH_AS(parse_plan("[space]\nparams = x\n[space.x]\nlower = 0\nupper = 1\n"
                                    "[energy]\nmode = sampled\n"),
                         "[energy] sampled needs exactly one of command/replay", ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_plan("[space]\nparams = x\n[space.x]\nlower = 0\nupper = 1\n"
                   "[energy]\nmode = sampled\ncommand = c\nreplay = r\n"),
        "[energy] sampled needs exactly one of command/replay", ConfigError);
    // A simulated-energy plan without a sim_trainer objective must name its profile.
    CHECK_THROWS_AS(parse_plan("[space]\nparams = x\n[space.x]\nlower = 0\nupper = 1\n"
                               "[energy]\nmode = simulated\n"),
                    ConfigError);
    // Bad values caught by the value constructors still surface as config errors.
    CHECK_THROWS_WITH_AS(parse_plan("[space]\nparams = x\n[space.x]\nlower = 1\nupper = 0\n"),
                         "param 'x': lower must be < upper", ConfigError);
    CHECK_THROWS_WITH_AS(parse_plan("[space]\nparams = x\n[space.x]\nlower = 0\nupper = 1\n"
                                    "[objective]\nfunction = rastrigin\n"),
                         "unknown synthetic function 'rastrigin'", ConfigError);
}

TEST_CASE("simulated energy inherits the trainer dataset and arch") {
    const ExperimentPlan plan = parse_plan(
        "[space]\nparams = x\n[space.x]\nlower = 0\nupper = 1\n"
        "[objective]\nkind = sim_trainer\ndataset = cifar10\nconv_layers = 4\nrelu_layers = 2\n"
        "[energy]\nmode = simulated\n");
    const auto& sim = std::get<EnergySimulated>(plan.energy);
    CHECK(sim.profile == "cifar10");
    CHECK(sim.arch.conv_layers == 4);
    CHECK(sim.arch.linear_layers == 3);
    CHECK(sim.arch.relu_layers == 2);
}

TEST_CASE("plan validation reports every semantic problem") {
    ExperimentPlan plan = parse_plan(kFullPlanText);

    auto with = [&](auto mutate) {
        ExperimentPlan p = plan;
        mutate(p);
        return validate_plan(p);
    };

    CHECK(with([](ExperimentPlan& p) { p.strategy_kind = "annealing"; }) ==
          std::vector<std::string>{"unknown strategy 'annealing'"});
    CHECK(with([](ExperimentPlan& p) { p.rounds = 0; }) ==
          std::vector<std::string>{"rounds must be >= 1"});
    CHECK(with([](ExperimentPlan& p) { p.repetitions = 0; }) ==
          std::vector<std::string>{"repetitions must be >= 1"});
    CHECK(with([](ExperimentPlan& p) {
              p.rounds = 2000;
              p.repetitions = 1000;
          }) ==
          std::vector<std::string>{"budget cap exceeded: rounds*repetitions = 2000000 > 1000000"});
    CHECK(with([](ExperimentPlan& p) { p.name = "bad\tname"; }).size() == 1);
    CHECK(with([](ExperimentPlan& p) {
              std::get<EnergySimulated>(p.energy).profile = "imagenet";
          }) == std::vector<std::string>{"unknown dataset profile 'imagenet'"});
    CHECK(with([](ExperimentPlan& p) { std::get<SyntheticSpec>(p.objective).noise_sigma = -1; }) ==
          std::vector<std::string>{"objective noise_sigma must be >= 0"});

    // Grid-specific checks fire only for the grid strategy.
    ExperimentPlan grid = plan;
    grid.strategy_kind = "grid";
    grid.strategy.grid_cap = 10;
    const auto too_large = validate_plan(grid);
    REQUIRE(too_large.size() == 1);
    CHECK(too_large[0] == "grid too large: 50 configs exceeds cap 10");

    grid.strategy.grid_cap = 10'000'000;
    grid.rounds = 64;
    const auto too_small = validate_plan(grid);
    REQUIRE(too_small.size() == 1);
    CHECK(too_small[0] == "grid has only 50 configs for 64 rounds");

    ExperimentPlan ext = plan;
    ext.objective = ExternalSpec{"echo score=1", "(", 10.0};
    const auto bad_re = validate_plan(ext);
    REQUIRE(bad_re.size() == 1);
    CHECK(bad_re[0].rfind("bad score_pattern: ", 0) == 0);
}

TEST_CASE("plans round-trip through their canonical text form") {
    const ExperimentPlan plan = parse_plan(kFullPlanText);
    const std::string canonical = plan_to_config_text(plan);
    const ExperimentPlan reparsed =
        plan_from_config(TextConfig::parse_string(canonical, "canonical"));
    CHECK(plan_to_config_text(reparsed) == canonical);

    // Spot checks of the serialized content.
    CHECK(canonical.find("name = demo\n") != std::string::npos);
    CHECK(canonical.find("scale = log-uniform\n") != std::string::npos);
    CHECK(canonical.find("lower = 1e-05\n") != std::string::npos);
    CHECK(canonical.find("labels = sgd, adam\n") != std::string::npos);
    CHECK(canonical.find("mode = simulated\n") != std::string::npos);
}

TEST_CASE("the power command override only touches sampled plans") {
    ExperimentPlan sampled = parse_plan(
        "[space]\nparams = x\n[space.x]\nlower = 0\nupper = 1\n"
        "[energy]\nmode = sampled\nreplay = idle.trace\n");
    ExperimentPlan simulated = parse_plan(kFullPlanText);

    REQUIRE(setenv("GREENOPT_POWER_CMD", "ipmitool dcmi power reading", 1) == 0);
    apply_power_command_override(sampled);
    apply_power_command_override(simulated);
    const auto& source = std::get<EnergySampled>(sampled.energy).source;
    const auto& argv = std::get<PowerSourceCommand>(source).argv;
    CHECK(argv == std::vector<std::string>{"ipmitool", "dcmi", "power", "reading"});
    CHECK(std::holds_alternative<EnergySimulated>(simulated.energy));

    REQUIRE(setenv("GREENOPT_POWER_CMD", "   ", 1) == 0);
    CHECK_THROWS_WITH_AS(apply_power_command_override(sampled),
                         "GREENOPT_POWER_CMD is set but empty", ConfigError);

    REQUIRE(unsetenv("GREENOPT_POWER_CMD") == 0);
    ExperimentPlan untouched = parse_plan(
        "[space]\nparams = x\n[space.x]\nlower = 0\nupper = 1\n"
        "[energy]\nmode = sampled\nreplay = idle.trace\n");
    apply_power_command_override(untouched);
    CHECK(std::holds_alternative<PowerSourceReplay>(
        std::get<EnergySampled>(untouched.energy).source));
}

}  // TEST_SUITE
