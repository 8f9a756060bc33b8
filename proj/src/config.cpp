#include "netfx/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "netfx/error.hpp"

namespace netfx {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

} // namespace

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

Config Config::parse(std::istream& in) {
    Config cfg;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": unclosed section");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": key outside any [section]");
        const std::string full = section + "." + key;
        if (!cfg.entries_.emplace(full, Entry{value, false}).second)
            throw ConfigError("duplicate config key '" + full + "'");
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in);
}

Config Config::parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

const Config::Entry& Config::find(const std::string& section, const std::string& key) const {
    const auto it = entries_.find(section + "." + key);
    if (it == entries_.end())
        throw ConfigError("missing config key '" + section + "." + key + "'");
    it->second.used = true;
    return it->second;
}

bool Config::has(const std::string& section, const std::string& key) const {
    const auto it = entries_.find(section + "." + key);
    if (it != entries_.end()) it->second.used = true;
    return it != entries_.end();
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
    return find(section, key).value;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    return has(section, key) ? find(section, key).value : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    const std::string& v = find(section, key).value;
    try {
        return std::stod(v);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + section + "." + key + "': cannot parse '" + v +
                          "' as a number");
    }
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

long Config::get_int(const std::string& section, const std::string& key) const {
    const std::string& v = find(section, key).value;
    try {
        std::size_t used = 0;
        const long out = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + section + "." + key + "': cannot parse '" + v +
                          "' as an integer");
    }
}

long Config::get_int(const std::string& section, const std::string& key, long fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_list(find(section, key).value)) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config key '" + section + "." + key + "': cannot parse '" + item +
                              "' as a number");
        }
    }
    return out;
}

std::vector<int> Config::get_ints(const std::string& section, const std::string& key) const {
    std::vector<int> out;
    for (double v : get_doubles(section, key)) out.push_back(static_cast<int>(v));
    return out;
}

std::vector<std::string> Config::get_strings(const std::string& section,
                                             const std::string& key) const {
    return split_list(find(section, key).value);
}

void Config::finish() const {
    std::vector<std::string> unused;
    for (const auto& [key, entry] : entries_)
        if (!entry.used) unused.push_back(key);
    if (!unused.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unused) msg += " " + k;
        throw ConfigError(msg);
    }
}

} // namespace netfx
