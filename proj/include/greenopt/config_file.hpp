#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace greenopt {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// INI-style key-value text with [dotted.section] headers, '#'/';' comments.
class TextConfig {
public:
    static TextConfig parse_file(const std::string& path);
    static TextConfig parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;
    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    std::string require(const std::string& section, const std::string& key) const;

    double require_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    std::int64_t require_int(const std::string& section, const std::string& key) const;
    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback) const;

    // Comma-separated list, items trimmed; missing key -> empty.
    std::vector<std::string> get_list(const std::string& section, const std::string& key) const;

    // Declaration order of sections in the file.
    const std::vector<std::string>& section_names() const { return order_; }
    std::vector<std::string> keys(const std::string& section) const;

private:
    std::string origin_;
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::map<std::string, std::vector<std::string>> key_order_;
    std::vector<std::string> order_;
};

std::string trim(const std::string& s);

}  // namespace greenopt
