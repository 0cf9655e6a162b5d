#ifndef FRONTDOOR_KEYVALUE_HPP
#define FRONTDOOR_KEYVALUE_HPP

#include <map>
#include <string>
#include <string_view>

namespace frontdoor {

/// Flat `key = value` text with `#` comments. Keys are kept sorted so that
/// formatting is canonical.
class KeyValues {
public:
    static KeyValues parse(std::string_view text);
    static KeyValues load(const std::string& path);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }
    void merge(const KeyValues& other);

    /// Typed getters return the fallback when the key is absent and throw
    /// InvalidConfig when the value does not parse.
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;

    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }
    std::string format() const;

private:
    std::map<std::string, std::string> entries_;
};

}  // namespace frontdoor

#endif
