#pragma once

#include <cstdint>
#include <cassert>
#include <iosfwd>

namespace canonic {

/// Element of the prime field F_p, p < 2^62. Products are carried out in
/// unsigned 128-bit, so no overflow for any valid modulus.
class Fp {
public:
    // Mersenne prime 2^61 - 1, the default modulus used by the CLI.
    static constexpr std::uint64_t kDefaultModulus = 2305843009213693951ull;

    Fp() : v_(0), p_(kDefaultModulus) {}
    Fp(std::uint64_t v, std::uint64_t p) : v_(v % p), p_(p) {}
    static Fp from_int(std::int64_t v, std::uint64_t p) {
        std::int64_t r = v % static_cast<std::int64_t>(p);
        if (r < 0) r += static_cast<std::int64_t>(p);
        return Fp(static_cast<std::uint64_t>(r), p);
    }

    std::uint64_t value() const { return v_; }
    std::uint64_t modulus() const { return p_; }

    Fp zero() const { return Fp(0, p_); }
    Fp one() const { return Fp(1, p_); }

    bool is_zero() const { return v_ == 0; }

    friend Fp operator+(Fp a, Fp b) {
        assert(a.p_ == b.p_);
        std::uint64_t s = a.v_ + b.v_;
        if (s >= a.p_) s -= a.p_;
        return Fp(s, a.p_);
    }
    friend Fp operator-(Fp a, Fp b) {
        assert(a.p_ == b.p_);
        std::uint64_t s = a.v_ >= b.v_ ? a.v_ - b.v_ : a.v_ + a.p_ - b.v_;
        return Fp(s, a.p_);
    }
    friend Fp operator*(Fp a, Fp b) {
        assert(a.p_ == b.p_);
        unsigned __int128 prod = static_cast<unsigned __int128>(a.v_) * b.v_;
        return Fp(static_cast<std::uint64_t>(prod % a.p_), a.p_);
    }
    Fp operator-() const { return Fp(v_ == 0 ? 0 : p_ - v_, p_); }

    Fp pow(std::uint64_t e) const {
        Fp r = one(), b = *this;
        while (e) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }
    Fp inv() const {
        assert(v_ != 0);
        return pow(p_ - 2);
    }
    friend Fp operator/(Fp a, Fp b) { return a * b.inv(); }

    Fp& operator+=(Fp b) { return *this = *this + b; }
    Fp& operator-=(Fp b) { return *this = *this - b; }
    Fp& operator*=(Fp b) { return *this = *this * b; }
    Fp& operator/=(Fp b) { return *this = *this / b; }

    friend bool operator==(Fp a, Fp b) { return a.v_ == b.v_ && a.p_ == b.p_; }
    friend bool operator!=(Fp a, Fp b) { return !(a == b); }

private:
    std::uint64_t v_;
    std::uint64_t p_;
};

}  // namespace canonic
