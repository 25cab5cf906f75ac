#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <stop_token>
#include <string>
#include <variant>
#include <vector>

namespace greenopt {

struct PowerSample {
    std::uint64_t t_ms;
    double watts;
};

struct PowerTrace {
    std::vector<PowerSample> samples;
    std::string source_id;

    double duration_s() const;
};

struct EnergyReading {
    double joules_total;
    double joules_net;  // total minus idle_watts * duration; may be negative
    double idle_watts;
    double duration_s;

    bool net_negative() const { return joules_net < 0.0; }
};

// Trapezoidal integration. Requires >= 2 samples and strictly increasing
// timestamps; a negative net reading is reported as-is, never clamped.
EnergyReading integrate_trace(const PowerTrace&, double idle_watts = 0.0);

struct PowerSourceCommand {
    std::vector<std::string> argv;  // must print one decimal wattage
};

struct PowerSourceReplay {
    std::string path;  // powertrace file replayed verbatim
};

using PowerSource = std::variant<PowerSourceCommand, PowerSourceReplay>;

class PowerSamplingError : public std::runtime_error {
public:
    PowerSamplingError(const std::string& what, PowerTrace partial)
        : std::runtime_error(what), partial_trace(std::move(partial)) {}
    PowerTrace partial_trace;
};

// Polls a command source at the given interval until stop is requested,
// recording wall-clock-relative timestamps. Two consecutive probe failures
// abort with the partial trace attached. A replay source returns the file
// contents verbatim and ignores the interval and stop token.
PowerTrace sample_power(const PowerSource&, int interval_ms, std::stop_token stop);

// Mean wattage over a sampling window (replay sources: mean of the file).
double measure_idle(const PowerSource&, double window_s = 30.0, int interval_ms = 100);

PowerTrace read_power_trace(std::istream&, const std::string& origin = "<stream>");
PowerTrace read_power_trace_file(const std::string& path);
void write_power_trace(std::ostream&, const PowerTrace&);

struct ArchDescriptor {
    int conv_layers = 1;
    int linear_layers = 3;
    int relu_layers = 0;

    // Calibration covers conv 1..4, linear 3..7, relu 0..4; outside that the
    // simulation still answers but marks the result extrapolated.
    bool within_calibration_range() const;
    int field(const std::string& name) const;  // "conv_layers" etc.
};

struct DatasetProfile {
    std::string id;
    double base_joules;
    double delta_conv;    // full-range relative increase, conv 1 -> 4
    double delta_linear;  // linear 3 -> 7
    double delta_relu;    // relu absent -> present
};

struct SimulatedEnergy {
    double joules;
    bool extrapolated;
};

inline constexpr double kSimEnergyNoiseSigma = 0.009;

// Multiplicative layer-count model with lognormal run-to-run noise. Passing
// a null rng disables the noise term.
SimulatedEnergy simulate_energy(const ArchDescriptor&, const DatasetProfile&,
                                std::mt19937_64* rng = nullptr,
                                double noise_sigma = kSimEnergyNoiseSigma);

}  // namespace greenopt
