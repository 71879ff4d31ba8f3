#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace eigshape::bessel {

namespace detail {

// Power series sum_k (-1)^k (x/2)^{2k+n} / (k! (k+n)!), n = 0 or 1.
inline double series(int n, double x) {
  const double h = 0.5 * x;
  const double h2 = h * h;
  double term = n == 0 ? 1.0 : h;
  double sum = term;
  for (int k = 1; k < 60; ++k) {
    term *= -h2 / (static_cast<double>(k) * (k + n));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Miller backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, normalised
// with J_0 + 2 sum_{k>=1} J_{2k} = 1.
inline void miller(double x, double& j0, double& j1) {
  int start = static_cast<int>(x + 30.0 + 10.0 * std::sqrt(x));
  start += start % 2;
  double jp = 0.0, jc = 1e-300, norm = 0.0;
  double r0 = 0.0, r1 = 0.0;
  for (int k = start; k >= 1; --k) {
    const double jm = 2.0 * k / x * jc - jp;
    jp = jc;
    jc = jm;
    // jc now holds J_{k-1}
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * jc;
    if (k - 1 == 1) r1 = jc;
    if (std::abs(jc) > 1e250) {
      jc *= 1e-250;
      jp *= 1e-250;
      norm *= 1e-250;
      r1 *= 1e-250;
    }
  }
  r0 = jc;
  norm += r0;
  j0 = r0 / norm;
  j1 = r1 / norm;
}

// Hankel asymptotic expansion for large x.
inline double asymptotic(int n, double x) {
  const double mu = 4.0 * n * n;
  double p = 1.0, q = 0.0;
  double term = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(next) > std::abs(term)) break;
    term = next;
    if (k % 2 == 1) {
      q += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    } else {
      p += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    }
    if (std::abs(term) < 1e-17) break;
  }
  const double chi = x - (0.5 * n + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace detail

inline double j0(double x) {
  if (x < 0.0) throw std::domain_error("bessel::j0: x must be >= 0");
  if (x <= 4.0) return detail::series(0, x);
  if (x >= 30.0) return detail::asymptotic(0, x);
  double a = 0.0, b = 0.0;
  detail::miller(x, a, b);
  return a;
}

inline double j1(double x) {
  if (x < 0.0) throw std::domain_error("bessel::j1: x must be >= 0");
  if (x <= 4.0) return detail::series(1, x);
  if (x >= 30.0) return detail::asymptotic(1, x);
  double a = 0.0, b = 0.0;
  detail::miller(x, a, b);
  return b;
}

/// J0'(x) = -J1(x).
inline double j0_prime(double x) { return -j1(x); }

/// n-th positive zero (n >= 1) of f, bracketed on a 0.1-step scan from
/// `from` and bisected to a bracket width below 1e-14.
inline double nth_zero(const std::function<double(double)>& f, int n, double from = 0.1) {
  if (n < 1) throw std::invalid_argument("bessel::nth_zero: n must be >= 1");
  double a = from, fa = f(a);
  int found = 0;
  for (int step = 1; step < 100000; ++step) {
    const double b = from + 0.1 * step;
    const double fb = f(b);
    if (fa == 0.0 || fa * fb < 0.0) {
      if (++found == n) {
        if (fa == 0.0) return a;
        double lo = a, hi = b, flo = fa;
        while (hi - lo > 1e-14) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          const double fm = f(mid);
          if (fm == 0.0) return mid;
          if (flo * fm < 0.0) {
            hi = mid;
          } else {
            lo = mid;
            flo = fm;
          }
        }
        return 0.5 * (lo + hi);
      }
    }
    a = b;
    fa = fb;
  }
  throw std::runtime_error("bessel::nth_zero: no sign change found");
}

/// j_{0,1}, first zero of J0.
inline double j0_zero(int n = 1) { return nth_zero([](double x) { return j0(x); }, n); }

/// First positive zero of J0' (equivalently of J1).
inline double j0_prime_zero(int n = 1) { return nth_zero([](double x) { return j1(x); }, n); }

}  // namespace eigshape::bessel
