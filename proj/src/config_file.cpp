#include "greenopt/config_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "greenopt/num_format.hpp"

namespace greenopt {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

TextConfig TextConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

TextConfig TextConfig::parse_string(const std::string& text, const std::string& origin) {
    TextConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& what) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';')
            continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                fail("unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                fail("empty section name");
            if (!cfg.sections_.count(section)) {
                cfg.sections_[section];
                cfg.order_.push_back(section);
            }
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            fail("expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        if (key.empty())
            fail("empty key");
        if (!cfg.sections_.count(section)) {
            cfg.sections_[section];
            cfg.order_.push_back(section);
        }
        auto& sec = cfg.sections_[section];
        if (sec.count(key))
            fail("duplicate key '" + key + "'");
        sec[key] = trim(t.substr(eq + 1));
        cfg.key_order_[section].push_back(key);
    }
    return cfg;
}

bool TextConfig::has_section(const std::string& section) const {
    return sections_.count(section) != 0;
}

bool TextConfig::has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) != 0;
}

std::optional<std::string> TextConfig::get(const std::string& section,
                                           const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end())
        return std::nullopt;
    auto kt = it->second.find(key);
    if (kt == it->second.end())
        return std::nullopt;
    return kt->second;
}

std::string TextConfig::get_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    auto v = get(section, key);
    return v ? *v : fallback;
}

std::string TextConfig::require(const std::string& section, const std::string& key) const {
    auto v = get(section, key);
    if (!v)
        throw ConfigError(origin_ + ": missing [" + section + "] " + key);
    return *v;
}

double TextConfig::require_double(const std::string& section, const std::string& key) const {
    const std::string v = require(section, key);
    try {
        return parse_double(v);
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": [" + section + "] " + key + ": bad number '" + v + "'");
    }
}

double TextConfig::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    return has(section, key) ? require_double(section, key) : fallback;
}

std::int64_t TextConfig::require_int(const std::string& section, const std::string& key) const {
    const std::string v = require(section, key);
    std::int64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(origin_ + ": [" + section + "] " + key + ": bad integer '" + v + "'");
    return out;
}

std::int64_t TextConfig::get_int(const std::string& section, const std::string& key,
                                 std::int64_t fallback) const {
    return has(section, key) ? require_int(section, key) : fallback;
}

std::vector<std::string> TextConfig::get_list(const std::string& section,
                                              const std::string& key) const {
    auto v = get(section, key);
    std::vector<std::string> out;
    if (!v)
        return out;
    std::string item;
    std::istringstream in(*v);
    while (std::getline(in, item, ',')) {
        const std::string t = trim(item);
        if (!t.empty())
            out.push_back(t);
    }
    return out;
}

std::vector<std::string> TextConfig::keys(const std::string& section) const {
    auto it = key_order_.find(section);
    return it == key_order_.end() ? std::vector<std::string>{} : it->second;
}

}  // namespace greenopt
