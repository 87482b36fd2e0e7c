#pragma once

#include <complex>
#include <cmath>
#include <boost/multiprecision/cpp_int.hpp>

#include "canonic/fp.hpp"

namespace canonic {

using Rational = boost::multiprecision::cpp_rational;
using Cplx = std::complex<double>;

/// Per-field glue used by the generic linear algebra: exactness flag,
/// neutral elements derived from a sample value, and a pivoting weight.
template <class F>
struct field_traits;

template <>
struct field_traits<Fp> {
    static constexpr bool exact = true;
    static Fp zero(const Fp& like) { return like.zero(); }
    static Fp one(const Fp& like) { return like.one(); }
    static bool is_zero(const Fp& a, double /*tol_scale*/ = 0) { return a.is_zero(); }
    static double pivot_weight(const Fp& a) { return a.is_zero() ? 0.0 : 1.0; }
};

template <>
struct field_traits<Rational> {
    static constexpr bool exact = true;
    static Rational zero(const Rational&) { return Rational(0); }
    static Rational one(const Rational&) { return Rational(1); }
    static bool is_zero(const Rational& a, double = 0) { return a == 0; }
    static double pivot_weight(const Rational& a) { return a == 0 ? 0.0 : 1.0; }
};

template <>
struct field_traits<Cplx> {
    static constexpr bool exact = false;
    static Cplx zero(const Cplx&) { return Cplx(0.0, 0.0); }
    static Cplx one(const Cplx&) { return Cplx(1.0, 0.0); }
    static bool is_zero(const Cplx& a, double tol_scale) { return std::abs(a) <= tol_scale; }
    static double pivot_weight(const Cplx& a) { return std::abs(a); }
};

}  // namespace canonic
