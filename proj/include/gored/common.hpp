#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gored {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : Error {
    int line = 0, column = 0;
    ParseError(const std::string& what, int line_, int col_)
        : Error("parse error at " + std::to_string(line_) + ":" + std::to_string(col_) + ": " + what),
          line(line_),
          column(col_) {}
};

struct NotAdmissibleRelation : Error {
    using Error::Error;
};
struct CompletionOverflow : Error {
    using Error::Error;
};
struct NotAdmissibleUpToCap : Error {
    using Error::Error;
};
struct FieldMismatch : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct NotBasic : Error {
    using Error::Error;
};
struct SideConditionNotCertified : Error {
    using Error::Error;
};
struct NotCertified : Error {
    using Error::Error;
};

/// FNV-1a 64-bit hash of a byte string. Used for content digests in traces;
/// stable across runs and platforms.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

/// Deterministic 64-bit generator (xorshift*). We avoid std distributions so
/// that seeded runs produce identical streams on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545f4914f6cdd1dull;
    }

    /// Uniform-ish value in [0, n).
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

    /// Small signed integer in [-k, k].
    long small_int(long k) { return static_cast<long>(below(2 * k + 1)) - k; }

  private:
    std::uint64_t state_;
};

}  // namespace gored
