#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace d2d {

// FNV-1a 64-bit. Used for config digests and dataset content hashes; not
// cryptographic, just a stable fingerprint.
class Fnv64 {
public:
    Fnv64& update(std::string_view bytes) {
        for (unsigned char c : bytes) {
            h_ ^= c;
            h_ *= 0x100000001b3ULL;
        }
        return *this;
    }

    std::uint64_t value() const { return h_; }

    std::string hex() const {
        static const char* digits = "0123456789abcdef";
        std::string out(16, '0');
        std::uint64_t v = h_;
        for (int i = 15; i >= 0; --i) {
            out[static_cast<std::size_t>(i)] = digits[v & 0xf];
            v >>= 4;
        }
        return out;
    }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline std::string digest_hex(std::string_view bytes) {
    return Fnv64().update(bytes).hex();
}

}  // namespace d2d
