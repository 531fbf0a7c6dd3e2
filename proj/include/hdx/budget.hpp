#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace hdx {

// Enumeration guard. Desk-scale operations refuse to enumerate past this
// cap unless HDX_BUDGET raises it.
struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

inline std::uint64_t enumeration_cap() {
    static std::uint64_t cap = [] {
        if (const char* env = std::getenv("HDX_BUDGET")) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(env, &end, 10);
            if (end != env && v > 0) return static_cast<std::uint64_t>(v);
        }
        return std::uint64_t{1} << 24;
    }();
    return cap;
}

inline void check_budget(std::uint64_t requested, const char* what) {
    if (requested > enumeration_cap())
        throw budget_error(std::string(what) + ": enumeration of " +
                           std::to_string(requested) + " items exceeds budget " +
                           std::to_string(enumeration_cap()) +
                           " (set HDX_BUDGET to override)");
}

} // namespace hdx
