#pragma once

#include <map>
#include <string>
#include <vector>

namespace mmgenre {

// Flat TOML-style key-value config: `[section]` headers, `key = value`
// lines, `#` comments. Keys are exposed as dotted paths (section.key).
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    // Comma-separated list value.
    std::vector<std::string> get_list(const std::string& key) const;

    // Distinct immediate child names under a dotted prefix, e.g.
    // sections("feature") lists NAME for every [feature.NAME].
    std::vector<std::string> sections(const std::string& prefix) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace mmgenre
