#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "gored/common.hpp"

namespace gored {

/// Exact rational arithmetic. Elements are arbitrary-precision fractions,
/// always kept in lowest terms (mpq_class canonicalizes on every operation).
class Rationals {
  public:
    using Elem = mpq_class;

    static constexpr bool prime_field = false;

    Elem zero() const { return Elem(0); }
    Elem one() const { return Elem(1); }
    Elem from_long(long v) const { return Elem(v); }

    Elem add(const Elem& a, const Elem& b) const { return a + b; }
    Elem sub(const Elem& a, const Elem& b) const { return a - b; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b; }
    Elem neg(const Elem& a) const { return -a; }
    Elem inv(const Elem& a) const {
        if (a == 0) throw Error("division by zero");
        return Elem(1) / a;
    }
    Elem div(const Elem& a, const Elem& b) const { return mul(a, inv(b)); }

    bool is_zero(const Elem& a) const { return a == 0; }
    bool eq(const Elem& a, const Elem& b) const { return a == b; }

    std::string str(const Elem& a) const { return a.get_str(); }

    /// Accepts "n" or "n/d" with optional sign.
    Elem parse(const std::string& s) const {
        mpq_class q;
        if (q.set_str(s, 10) != 0) throw Error("bad rational literal '" + s + "'");
        if (q.get_den() == 0) throw Error("zero denominator in '" + s + "'");
        q.canonicalize();
        return q;
    }

    std::string name() const { return "Q"; }

    bool operator==(const Rationals&) const { return true; }
    bool operator!=(const Rationals&) const { return false; }
};

/// GF(p) for a word-sized prime p. Elements are residues in [0, p).
class PrimeField {
  public:
    using Elem = std::uint64_t;

    static constexpr bool prime_field = true;

    explicit PrimeField(std::uint64_t p) : p_(p) {
        if (p < 2 || !is_prime(p)) throw Error("modulus " + std::to_string(p) + " is not prime");
        if (p >= (1ull << 32)) throw Error("modulus too large");
    }

    std::uint64_t modulus() const { return p_; }

    Elem zero() const { return 0; }
    Elem one() const { return p_ == 1 ? 0 : 1; }
    Elem from_long(long v) const {
        long m = v % static_cast<long>(p_);
        if (m < 0) m += static_cast<long>(p_);
        return static_cast<Elem>(m);
    }

    Elem add(Elem a, Elem b) const {
        Elem s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    Elem sub(Elem a, Elem b) const { return a >= b ? a - b : a + p_ - b; }
    Elem neg(Elem a) const { return a ? p_ - a : 0; }
    Elem mul(Elem a, Elem b) const {
        return static_cast<Elem>((static_cast<unsigned __int128>(a) * b) % p_);
    }
    Elem inv(Elem a) const {
        if (a == 0) throw Error("division by zero");
        // extended Euclid
        std::int64_t t = 0, nt = 1;
        std::int64_t r = static_cast<std::int64_t>(p_), nr = static_cast<std::int64_t>(a);
        while (nr != 0) {
            std::int64_t q = r / nr;
            std::int64_t tmp = t - q * nt;
            t = nt;
            nt = tmp;
            tmp = r - q * nr;
            r = nr;
            nr = tmp;
        }
        if (t < 0) t += static_cast<std::int64_t>(p_);
        return static_cast<Elem>(t);
    }
    Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }

    bool is_zero(Elem a) const { return a == 0; }
    bool eq(Elem a, Elem b) const { return a == b; }

    std::string str(Elem a) const { return std::to_string(a); }

    Elem parse(const std::string& s) const {
        // integer literal, or n/d evaluated in the field
        auto slash = s.find('/');
        if (slash == std::string::npos) return from_str_int(s);
        return div(from_str_int(s.substr(0, slash)), from_str_int(s.substr(slash + 1)));
    }

    std::string name() const { return "GF(" + std::to_string(p_) + ")"; }

    bool operator==(const PrimeField& o) const { return p_ == o.p_; }
    bool operator!=(const PrimeField& o) const { return p_ != o.p_; }

    static bool is_prime(std::uint64_t n) {
        if (n < 2) return false;
        for (std::uint64_t d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    }

  private:
    Elem from_str_int(const std::string& s) const {
        if (s.empty()) throw Error("empty scalar literal");
        std::size_t i = 0;
        bool negative = false;
        if (s[0] == '+' || s[0] == '-') {
            negative = s[0] == '-';
            i = 1;
        }
        if (i == s.size()) throw Error("bad scalar literal '" + s + "'");
        Elem acc = 0;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') throw Error("bad scalar literal '" + s + "'");
            acc = add(mul(acc, 10 % p_), static_cast<Elem>(s[i] - '0') % p_);
        }
        return negative ? neg(acc) : acc;
    }

    std::uint64_t p_;
};

/// Runtime description of the scalar field, as written in algebra files.
struct FieldSpec {
    bool rational = true;
    std::uint64_t p = 0;

    static FieldSpec rationals() { return {true, 0}; }
    static FieldSpec prime(std::uint64_t p) { return {false, p}; }

    std::string str() const { return rational ? "Q" : "GF(" + std::to_string(p) + ")"; }

    bool operator==(const FieldSpec& o) const { return rational == o.rational && p == o.p; }
};

inline FieldSpec spec_of(const Rationals&) { return FieldSpec::rationals(); }
inline FieldSpec spec_of(const PrimeField& f) { return FieldSpec::prime(f.modulus()); }

}  // namespace gored
