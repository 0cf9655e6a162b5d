#include "frontdoor/keyvalue.hpp"

#include <charconv>
#include <sstream>

#include "frontdoor/dataset.hpp"
#include "frontdoor/error.hpp"

namespace frontdoor {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

KeyValues KeyValues::parse(std::string_view text) {
    KeyValues kv;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::InvalidConfig, "config line " + std::to_string(lineno) + ": expected 'key = value'");
        auto key = trim(std::string_view(line).substr(0, eq));
        if (key.empty()) throw Error(Errc::InvalidConfig, "config line " + std::to_string(lineno) + ": empty key");
        kv.entries_[key] = trim(std::string_view(line).substr(eq + 1));
    }
    return kv;
}

KeyValues KeyValues::load(const std::string& path) { return parse(read_text(path)); }

void KeyValues::merge(const KeyValues& other) {
    for (const auto& [k, v] : other.entries_) entries_[k] = v;
}

std::string KeyValues::get(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& s = it->second;
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw Error(Errc::InvalidConfig, "config key '" + key + "': not a number: '" + s + "'");
    return v;
}

long long KeyValues::get_int(const std::string& key, long long fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& s = it->second;
    long long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw Error(Errc::InvalidConfig, "config key '" + key + "': not an integer: '" + s + "'");
    return v;
}

std::string KeyValues::format() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
    return out;
}

}  // namespace frontdoor
