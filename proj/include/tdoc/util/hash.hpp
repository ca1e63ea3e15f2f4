#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace tdoc {

// 64-bit FNV-1a. Stable across platforms, used for fingerprints only.
class Fnv1a {
public:
    Fnv1a& update(std::string_view bytes) {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= 0x100000001b3ULL;
        }
        return *this;
    }

    // Length-prefixed so that ("ab","c") and ("a","bc") hash differently.
    Fnv1a& field(std::string_view bytes) {
        update(std::to_string(bytes.size()));
        update(":");
        return update(bytes);
    }

    std::uint64_t value() const { return state_; }

    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
        return buf;
    }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string fingerprint(std::string_view bytes) { return Fnv1a{}.update(bytes).hex(); }

}  // namespace tdoc
