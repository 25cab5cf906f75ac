#include "greenopt/energy.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "greenopt/num_format.hpp"
#include "greenopt/rng.hpp"
#include "greenopt/subprocess.hpp"

namespace greenopt {

using Clock = std::chrono::steady_clock;

double PowerTrace::duration_s() const {
    if (samples.size() < 2)
        return 0.0;
    return static_cast<double>(samples.back().t_ms - samples.front().t_ms) / 1000.0;
}

EnergyReading integrate_trace(const PowerTrace& trace, double idle_watts) {
    const auto& s = trace.samples;
    if (s.size() < 2)
        throw std::invalid_argument("trace needs at least 2 samples");
    double joules = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i].t_ms <= s[i - 1].t_ms)
            throw std::invalid_argument("trace timestamps not strictly increasing");
        if (!std::isfinite(s[i].watts) || !std::isfinite(s[i - 1].watts))
            throw std::invalid_argument("trace wattage not finite");
        const double dt = static_cast<double>(s[i].t_ms - s[i - 1].t_ms) / 1000.0;
        joules += 0.5 * (s[i].watts + s[i - 1].watts) * dt;
    }
    const double duration = trace.duration_s();
    return {joules, joules - idle_watts * duration, idle_watts, duration};
}

namespace {

bool parse_watts(const std::string& text, double& watts) {
    const char* p = text.c_str();
    while (*p && !(std::isdigit(static_cast<unsigned char>(*p)) || *p == '-' || *p == '+' ||
                   *p == '.'))
        ++p;
    if (!*p)
        return false;
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p || !std::isfinite(v))
        return false;
    watts = v;
    return true;
}

void sleep_until_or_stop(Clock::time_point tick, const std::stop_token& stop) {
    while (!stop.stop_requested()) {
        const auto now = Clock::now();
        if (now >= tick)
            return;
        const auto chunk = std::min(tick - now, Clock::duration(std::chrono::milliseconds(5)));
        std::this_thread::sleep_for(chunk);
    }
}

std::string join_argv(const std::vector<std::string>& argv) {
    std::string out;
    for (const auto& a : argv) {
        if (!out.empty())
            out += ' ';
        out += a;
    }
    return out;
}

}  // namespace

PowerTrace sample_power(const PowerSource& source, int interval_ms, std::stop_token stop) {
    if (const auto* replay = std::get_if<PowerSourceReplay>(&source))
        return read_power_trace_file(replay->path);

    const auto& cmd = std::get<PowerSourceCommand>(source);
    if (cmd.argv.empty())
        throw std::invalid_argument("power source command is empty");
    if (interval_ms < 1)
        throw std::invalid_argument("interval_ms must be >= 1");

    PowerTrace trace;
    trace.source_id = join_argv(cmd.argv);
    const double probe_timeout_s = std::max(1.0, 5.0 * interval_ms / 1000.0);
    const auto t0 = Clock::now();

    // Samples are stamped with the probe's initiation time, not its return
    // time: a probe that stalls must not shrink the window the trace covers.
    const auto poll_once = [&]() -> bool {
        const auto started = Clock::now();
        double watts = 0.0;
        bool ok = false;
        try {
            const CommandResult r = run_argv(cmd.argv, probe_timeout_s);
            ok = !r.timed_out && r.exit_code == 0 && parse_watts(r.output, watts);
        } catch (const std::exception&) {
            ok = false;
        }
        if (!ok)
            return false;
        auto t = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::milliseconds>(started - t0).count());
        if (!trace.samples.empty() && t <= trace.samples.back().t_ms)
            t = trace.samples.back().t_ms + 1;
        trace.samples.push_back({t, watts});
        return true;
    };

    auto tick = t0;
    int consecutive_failures = 0;
    while (!stop.stop_requested()) {
        if (poll_once()) {
            consecutive_failures = 0;
        } else if (++consecutive_failures >= 2) {
            throw PowerSamplingError("power probe failed twice consecutively", std::move(trace));
        }
        tick += std::chrono::milliseconds(interval_ms);
        if (tick < Clock::now())
            tick = Clock::now();  // probe overran; skip the missed ticks
        sleep_until_or_stop(tick, stop);
    }
    // Best-effort closing sample so the integral also covers the tail of the
    // metered window; its failure is not part of the two-strikes contract.
    if (!trace.samples.empty())
        poll_once();
    return trace;
}

double measure_idle(const PowerSource& source, double window_s, int interval_ms) {
    PowerTrace trace;
    if (std::holds_alternative<PowerSourceReplay>(source)) {
        trace = sample_power(source, interval_ms, {});
    } else {
        if (window_s <= 0.0)
            throw std::invalid_argument("idle window must be positive");
        std::stop_source stopper;
        std::jthread timer([&stopper, window_s](std::stop_token tok) {
            const auto end = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                                std::chrono::duration<double>(window_s));
            while (Clock::now() < end && !tok.stop_requested())
                std::this_thread::sleep_for(std::chrono::milliseconds(2));
            stopper.request_stop();
        });
        trace = sample_power(source, interval_ms, stopper.get_token());
    }
    if (trace.samples.empty())
        throw std::runtime_error("idle measurement collected no samples");
    double sum = 0.0;
    for (const auto& s : trace.samples)
        sum += s.watts;
    return sum / static_cast<double>(trace.samples.size());
}

PowerTrace read_power_trace(std::istream& in, const std::string& origin) {
    std::string line;
    if (!std::getline(in, line) || line != "# powertrace v1")
        throw std::runtime_error(origin + ": bad powertrace header");
    PowerTrace trace;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        if (line[0] == '#') {
            constexpr std::string_view kSource = "# source ";
            if (line.rfind(kSource, 0) == 0)
                trace.source_id = line.substr(kSource.size());
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": expected t_ms<TAB>watts");
        std::uint64_t t = 0;
        const auto [p, ec] = std::from_chars(line.data(), line.data() + tab, t);
        if (ec != std::errc() || p != line.data() + tab)
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": bad timestamp");
        double watts = 0.0;
        try {
            watts = parse_double(std::string_view(line).substr(tab + 1));
        } catch (const std::exception&) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": bad wattage");
        }
        if (!trace.samples.empty() && t <= trace.samples.back().t_ms)
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": timestamps not strictly increasing");
        trace.samples.push_back({t, watts});
    }
    return trace;
}

PowerTrace read_power_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open trace file: " + path);
    return read_power_trace(in, path);
}

void write_power_trace(std::ostream& out, const PowerTrace& trace) {
    out << "# powertrace v1\n";
    if (!trace.source_id.empty())
        out << "# source " << trace.source_id << "\n";
    for (const auto& s : trace.samples)
        out << s.t_ms << '\t' << format_double(s.watts) << "\n";
}

bool ArchDescriptor::within_calibration_range() const {
    return conv_layers >= 1 && conv_layers <= 4 && linear_layers >= 3 && linear_layers <= 7 &&
           relu_layers >= 0 && relu_layers <= 4;
}

int ArchDescriptor::field(const std::string& name) const {
    if (name == "conv_layers")
        return conv_layers;
    if (name == "linear_layers")
        return linear_layers;
    if (name == "relu_layers")
        return relu_layers;
    throw std::invalid_argument("unknown arch field '" + name + "'");
}

SimulatedEnergy simulate_energy(const ArchDescriptor& arch, const DatasetProfile& profile,
                                std::mt19937_64* rng, double noise_sigma) {
    if (arch.conv_layers < 1 || arch.linear_layers < 1 || arch.relu_layers < 0)
        throw std::invalid_argument("invalid arch: conv >= 1, linear >= 1, relu >= 0 required");
    if (!(profile.base_joules > 0.0))
        throw std::invalid_argument("profile base_joules must be positive");
    double joules = profile.base_joules;
    joules *= 1.0 + profile.delta_conv * (arch.conv_layers - 1) / 3.0;
    joules *= 1.0 + profile.delta_linear * (arch.linear_layers - 3) / 4.0;
    if (arch.relu_layers > 0)
        joules *= 1.0 + profile.delta_relu;
    if (rng && noise_sigma > 0.0)
        joules *= std::exp(noise_sigma * normal(*rng));
    return {joules, !arch.within_calibration_range()};
}

}  // namespace greenopt
