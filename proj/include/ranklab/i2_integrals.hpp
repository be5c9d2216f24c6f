#pragma once

// Second-moment integrals of the averaging operator: the nested iterated
// integral over two ordered chains coupled through max(a1, b1), evaluated
// exactly with a small symbolic calculus on sums c * x^p * e^{r x}, together
// with the coarser closed-form bound 2 tau (1 - e^{-kappa tau}) / kappa.

#include <cstdint>

#include "core.hpp"

namespace ranklab {

/// Sum of terms c * x^p * exp(r * x); closed under products, multiplication
/// by exponentials, and antiderivatives vanishing at 0.
class ExpPoly {
 public:
  struct Term {
    double c;
    int p;
    double r;
  };

  static ExpPoly one() {
    ExpPoly f;
    f.terms_.push_back({1.0, 0, 0.0});
    return f;
  }

  const std::vector<Term>& terms() const { return terms_; }

  void add_term(double c, int p, double r) {
    for (auto& t : terms_) {
      if (t.p == p && std::abs(t.r - r) <= 1e-12 * std::max(1.0, std::abs(t.r))) {
        t.c += c;
        return;
      }
    }
    terms_.push_back({c, p, r});
  }

  ExpPoly times_exp(double r) const {
    ExpPoly f;
    for (const auto& t : terms_) f.add_term(t.c, t.p, t.r + r);
    return f;
  }

  ExpPoly times(const ExpPoly& other) const {
    ExpPoly f;
    for (const auto& a : terms_)
      for (const auto& b : other.terms_) f.add_term(a.c * b.c, a.p + b.p, a.r + b.r);
    return f;
  }

  /// F(x) = int_0^x of this; exact term-by-term antiderivative.
  ExpPoly antiderivative0() const {
    ExpPoly f;
    for (const auto& t : terms_) {
      if (std::abs(t.r) < 1e-13) {
        f.add_term(t.c / (t.p + 1), t.p + 1, 0.0);
        continue;
      }
      // int_0^x s^p e^{rs} ds = sum_k (-1)^k p!/(p-k)! x^{p-k} e^{rx} / r^{k+1}
      //                         + (-1)^{p+1} p! / r^{p+1}
      double fact = 1.0;  // p!/(p-k)!
      double rpow = t.r;  // r^{k+1}
      double sign = 1.0;  // (-1)^k
      for (int k = 0; k <= t.p; ++k) {
        f.add_term(t.c * sign * fact / rpow, t.p - k, t.r);
        if (k == t.p) {
          f.add_term(-t.c * sign * fact / rpow, 0, 0.0);
          break;
        }
        fact *= (t.p - k);
        rpow *= t.r;
        sign = -sign;
      }
    }
    return f;
  }

  double eval(double x) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.c * std::pow(x, t.p) * std::exp(t.r * x);
    return s;
  }

 private:
  std::vector<Term> terms_;
};

struct I2Value {
  double numeric = 0.0;  // exact nested iterated integral
  double reduced = 0.0;  // closed-form bound 2 tau (1 - e^{-kappa tau}) / kappa
};

namespace detail_i2 {

/// Chain factor as a function of the outermost variable: rates[0] belongs to
/// the outer variable itself; deeper entries are integrated out innermost
/// first, each from 0 to the enclosing variable.
inline ExpPoly chain_factor(const std::vector<double>& rates) {
  ExpPoly h = ExpPoly::one();
  for (size_t i = rates.size(); i-- > 1;) h = h.times_exp(rates[i]).antiderivative0();
  return h.times_exp(rates[0]);
}

}  // namespace detail_i2

/// Nested second-moment integral over two ordered chains a_1 >= ... >= 0 and
/// b_1 >= ... >= 0 below tau, with per-variable exponential rates and the
/// coupling exp(-K max(a_1, b_1)); both the exact value and the closed-form
/// comparison bound.
inline I2Value i2_integral(int d, double theta, double tau) {
  if (d < 3 || d > 8) fail_arg("i2_integral: d must be in [3, 8]");
  if (theta <= 0.0 || theta >= 1.0) fail_arg("i2_integral: theta must lie in (0,1)");
  if (tau <= 0.0) fail_arg("i2_integral: tau > 0 required");
  std::vector<double> a_rates, b_rates;
  double coupling = 0.0, kappa = 0.0;
  if (d % 2 == 1) {
    const int s = (d + 1) / 2;
    const double A = 0.5 * s * (s - 1);
    for (int i = 1; i <= s - 1; ++i) a_rates.push_back(2.0 * theta * (s - i));
    b_rates = a_rates;
    coupling = 4.0 * theta * A;
    kappa = 2.0 * theta * A;
  } else {
    const int s = d / 2;
    const double A = 0.5 * s * (s + 1), B = 0.5 * s * (s - 1);
    for (int i = 1; i <= s; ++i) a_rates.push_back(2.0 * theta * (s - i + 1));
    for (int i = 1; i <= s - 1; ++i) b_rates.push_back(2.0 * theta * (s - i));
    coupling = 2.0 * theta * (A + B);
    kappa = 2.0 * theta * B;
  }
  const ExpPoly fa = detail_i2::chain_factor(a_rates);
  const ExpPoly fb = detail_i2::chain_factor(b_rates);
  // split the square at the diagonal: max(a,b) = b on {a <= b} and a on
  // {b <= a}
  const double t1 = fb.times(fa.antiderivative0()).times_exp(-coupling).antiderivative0().eval(tau);
  const double t2 = fa.times(fb.antiderivative0()).times_exp(-coupling).antiderivative0().eval(tau);
  I2Value out;
  out.numeric = t1 + t2;
  out.reduced = 2.0 * tau * (1.0 - std::exp(-kappa * tau)) / kappa;
  return out;
}

}  // namespace ranklab
