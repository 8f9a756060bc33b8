#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace netfx {

// Flat `key = value` pairs grouped under `[section]` headers, `#` comments.
// Lookups go through typed getters; finish() rejects keys that were never
// consumed, so typos fail loudly.
class Config {
public:
    static Config parse(std::istream& in);
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long get_int(const std::string& section, const std::string& key) const;
    long get_int(const std::string& section, const std::string& key, long fallback) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
    std::vector<int> get_ints(const std::string& section, const std::string& key) const;
    std::vector<std::string> get_strings(const std::string& section, const std::string& key) const;

    // throws ConfigError on any key that no getter touched
    void finish() const;

private:
    struct Entry {
        std::string value;
        mutable bool used = false;
    };
    std::map<std::string, Entry> entries_; // "section.key" -> value
    const Entry& find(const std::string& section, const std::string& key) const;
};

std::vector<std::string> split_list(const std::string& text, char sep = ',');

} // namespace netfx
