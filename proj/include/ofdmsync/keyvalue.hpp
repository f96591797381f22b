#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ofdmsync {

/// Raised for malformed or unknown configuration entries. key() names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(message), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Flat `key = value` text. `#` starts a comment; blank lines ignored; later keys override earlier ones.
class KeyValueMap {
public:
    static KeyValueMap parse(std::string_view text);
    static KeyValueMap load(const std::string& path);

    bool contains(const std::string& key) const { return entries_.count(key) != 0; }
    std::optional<std::string> get(const std::string& key) const;
    void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }

    std::optional<double> get_double(const std::string& key) const;
    std::optional<long long> get_int(const std::string& key) const;
    std::optional<bool> get_bool(const std::string& key) const;
    /// Comma-separated list of reals.
    std::optional<std::vector<double>> get_double_list(const std::string& key) const;
    std::optional<std::vector<long long>> get_int_list(const std::string& key) const;
    std::optional<std::vector<std::string>> get_string_list(const std::string& key) const;

    /// Throws ConfigError for the first key not in `known`.
    void require_known(const std::set<std::string>& known) const;

    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }
    std::string to_text() const;

private:
    std::map<std::string, std::string> entries_;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace ofdmsync
