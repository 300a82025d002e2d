#pragma once

#include "anaflow/errors.hpp"
#include "anaflow/jet.hpp"

#include <cmath>
#include <complex>

namespace anaflow {

namespace detail {

inline double abs_of(double v) { return std::fabs(v); }
inline double abs_of(const std::complex<double>& v) { return std::abs(v); }

inline double exp_of(double v) { return std::exp(v); }
inline std::complex<double> exp_of(const std::complex<double>& v) { return std::exp(v); }
inline double log_of(double v) { return std::log(v); }
inline std::complex<double> log_of(const std::complex<double>& v) { return std::log(v); }
inline double sin_of(double v) { return std::sin(v); }
inline std::complex<double> sin_of(const std::complex<double>& v) { return std::sin(v); }
inline double cos_of(double v) { return std::cos(v); }
inline std::complex<double> cos_of(const std::complex<double>& v) { return std::cos(v); }

inline bool log_domain_ok(double v) { return v > 0.0; }
inline bool log_domain_ok(const std::complex<double>& v) {
    // principal branch; reject the cut (non-positive reals)
    return !(v.imag() == 0.0 && v.real() <= 0.0);
}

constexpr double kPivotFloor = 1e-300;

/// u minus its constant term; nilpotent in the truncated algebra.
template <class T>
Jet<T> fractional_part(const Jet<T>& u) {
    Jet<T> r = u;
    r.coeff(0) = T{};
    return r;
}

}  // namespace detail

/// Composition with elementary functions is exact on the truncation: with
/// w = u - u(0) nilpotent, the finite sums below reproduce the Taylor
/// coefficients of the composite through the jet degree.

template <class T>
Jet<T> jet_exp(const Jet<T>& u) {
    int D = u.degree();
    Jet<T> w = detail::fractional_part(u);
    Jet<T> acc = Jet<T>::constant(u.dim(), D, u.base_point(), T(1));
    Jet<T> pw = acc;
    double kfac = 1.0;
    for (int k = 1; k <= D; ++k) {
        pw = pw * w;
        kfac *= k;
        acc = acc + pw.scaled(T(1.0 / kfac));
    }
    return acc.scaled(detail::exp_of(u.value()));
}

template <class T>
Jet<T> jet_log(const Jet<T>& u, const std::string& subterm) {
    if (!detail::log_domain_ok(u.value()))
        throw DomainError("log outside the real-positive domain", subterm);
    int D = u.degree();
    T u0 = u.value();
    Jet<T> w = detail::fractional_part(u).scaled(T(1) / u0);
    Jet<T> acc = Jet<T>::constant(u.dim(), D, u.base_point(), detail::log_of(u0));
    Jet<T> pw = Jet<T>::constant(u.dim(), D, u.base_point(), T(1));
    double sign = 1.0;
    for (int k = 1; k <= D; ++k) {
        pw = pw * w;
        acc = acc + pw.scaled(T(sign / k));
        sign = -sign;
    }
    return acc;
}

template <class T>
void jet_sin_cos(const Jet<T>& u, Jet<T>& sin_out, Jet<T>& cos_out) {
    int D = u.degree();
    Jet<T> w = detail::fractional_part(u);
    Jet<T> s = Jet<T>::constant(u.dim(), D, u.base_point(), T{});   // sin(w)
    Jet<T> c = Jet<T>::constant(u.dim(), D, u.base_point(), T(1));  // cos(w)
    Jet<T> pw = c;
    double kfac = 1.0;
    double sign = 1.0;
    for (int k = 1; k <= D; ++k) {
        pw = pw * w;
        kfac *= k;
        if (k % 2 == 1) {
            s = s + pw.scaled(T(((k / 2) % 2 == 0 ? 1.0 : -1.0) / kfac));
        } else {
            sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
            c = c + pw.scaled(T(sign / kfac));
        }
    }
    T s0 = detail::sin_of(u.value());
    T c0 = detail::cos_of(u.value());
    sin_out = s.scaled(c0) + c.scaled(s0);
    cos_out = c.scaled(c0) - s.scaled(s0);
}

template <class T>
Jet<T> jet_inverse(const Jet<T>& u, const std::string& subterm) {
    if (detail::abs_of(u.value()) <= detail::kPivotFloor)
        throw DomainError("division by ~0", subterm);
    int D = u.degree();
    T u0 = u.value();
    Jet<T> w = detail::fractional_part(u).scaled(T(-1) / u0);
    Jet<T> acc = Jet<T>::constant(u.dim(), D, u.base_point(), T(1));
    Jet<T> pw = acc;
    for (int k = 1; k <= D; ++k) {
        pw = pw * w;
        acc = acc + pw;
    }
    return acc.scaled(T(1) / u0);
}

template <class T>
Jet<T> jet_pow(const Jet<T>& u, int exponent) {
    Jet<T> acc = Jet<T>::constant(u.dim(), u.degree(), u.base_point(), T(1));
    Jet<T> base = u;
    int e = exponent;
    while (e > 0) {
        if (e & 1) acc = acc * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return acc;
}

}  // namespace anaflow
