#include "ofdmsync/keyvalue.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ofdmsync {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string_view rest(text);
    while (true) {
        const auto comma = rest.find(',');
        const auto item = trim(rest.substr(0, comma));
        if (!item.empty()) {
            out.emplace_back(item);
        }
        if (comma == std::string_view::npos) {
            break;
        }
        rest.remove_prefix(comma + 1);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t(trim(text));
    if (t == "inf" || t == "+inf") {
        return INFINITY;
    }
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
        throw ConfigError(key, "invalid number for key '" + key + "': '" + t + "'");
    }
    return v;
}

long long parse_int(const std::string& key, const std::string& text) {
    const auto t = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
        throw ConfigError(key, "invalid integer for key '" + key + "': '" + std::string(t) + "'");
    }
    return v;
}

}  // namespace

KeyValueMap KeyValueMap::parse(std::string_view text) {
    KeyValueMap map;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            const std::string key(line);
            throw ConfigError(key, "line " + std::to_string(line_no) + ": expected 'key = value' for key '" +
                                       key + "'");
        }
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) {
            throw ConfigError(key, "line " + std::to_string(line_no) + ": empty key");
        }
        map.entries_[key] = std::string(trim(line.substr(eq + 1)));
    }
    return map;
}

KeyValueMap KeyValueMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::optional<std::string> KeyValueMap::get(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<double> KeyValueMap::get_double(const std::string& key) const {
    const auto v = get(key);
    if (!v) {
        return std::nullopt;
    }
    return parse_double(key, *v);
}

std::optional<long long> KeyValueMap::get_int(const std::string& key) const {
    const auto v = get(key);
    if (!v) {
        return std::nullopt;
    }
    return parse_int(key, *v);
}

std::optional<bool> KeyValueMap::get_bool(const std::string& key) const {
    const auto v = get(key);
    if (!v) {
        return std::nullopt;
    }
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") {
        return true;
    }
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") {
        return false;
    }
    throw ConfigError(key, "invalid boolean for key '" + key + "': '" + *v + "'");
}

std::optional<std::vector<double>> KeyValueMap::get_double_list(const std::string& key) const {
    const auto v = get(key);
    if (!v) {
        return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& item : split_list(*v)) {
        out.push_back(parse_double(key, item));
    }
    return out;
}

std::optional<std::vector<long long>> KeyValueMap::get_int_list(const std::string& key) const {
    const auto v = get(key);
    if (!v) {
        return std::nullopt;
    }
    std::vector<long long> out;
    for (const auto& item : split_list(*v)) {
        out.push_back(parse_int(key, item));
    }
    return out;
}

std::optional<std::vector<std::string>> KeyValueMap::get_string_list(const std::string& key) const {
    const auto v = get(key);
    if (!v) {
        return std::nullopt;
    }
    return split_list(*v);
}

void KeyValueMap::require_known(const std::set<std::string>& known) const {
    for (const auto& [key, value] : entries_) {
        if (known.count(key) == 0) {
            throw ConfigError(key, "unknown configuration key '" + key + "'");
        }
    }
}

std::string KeyValueMap::to_text() const {
    std::string out;
    for (const auto& [key, value] : entries_) {
        out += key + " = " + value + "\n";
    }
    return out;
}

std::string format_double(double value) {
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    for (int precision = 6; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) {
            break;
        }
    }
    return buf;
}

}  // namespace ofdmsync
