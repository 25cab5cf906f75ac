#pragma once

#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>

namespace greenopt {

// Shortest representation that parses back to the identical double. All file
// formats use this so that seeded reruns serialize byte-identically.
inline std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw std::runtime_error("format_double failed");
    return std::string(buf, p);
}

inline double parse_double(std::string_view s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::runtime_error("bad number: '" + std::string(s) + "'");
    return v;
}

}  // namespace greenopt
