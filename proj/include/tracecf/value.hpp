#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tracecf {

/// An attribute or feature value: categorical (string) or numeric (double).
using Value = std::variant<std::string, double>;

inline bool is_numeric(const Value& v) { return std::holds_alternative<double>(v); }
inline bool is_categorical(const Value& v) { return std::holds_alternative<std::string>(v); }

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline std::string to_display(const Value& v) {
    if (is_numeric(v)) return format_double(std::get<double>(v));
    return std::get<std::string>(v);
}

/// Insertion-ordered string->Value map. Attribute order is significant:
/// static feature layout follows the order attributes appear in the source.
class AttrMap {
public:
    using Entry = std::pair<std::string, Value>;

    bool contains(const std::string& key) const { return find(key) != nullptr; }

    const Value* find(const std::string& key) const {
        for (const auto& e : entries_)
            if (e.first == key) return &e.second;
        return nullptr;
    }

    const Value& at(const std::string& key) const;

    /// Inserts or overwrites; insertion order is kept on overwrite.
    void set(const std::string& key, Value value) {
        for (auto& e : entries_) {
            if (e.first == key) {
                e.second = std::move(value);
                return;
            }
        }
        entries_.emplace_back(key, std::move(value));
    }

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    bool operator==(const AttrMap&) const = default;

private:
    std::vector<Entry> entries_;
};

}  // namespace tracecf
