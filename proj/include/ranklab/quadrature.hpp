#pragma once

// Gauss-Legendre rules (cached per node count), a trapezoid rule for periodic
// integrands, and a Cauchy-difference refinement driver shared by every
// deterministic quadrature in the library.

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <mutex>
#include <type_traits>
#include <utility>
#include <vector>

#include "core.hpp"

namespace ranklab {

struct Rule1D {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre nodes/weights by Newton iteration on P_n; cached.
inline const Rule1D& gauss_legendre(int n) {
  static std::map<int, Rule1D> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) fail_arg("gauss_legendre: n >= 1 required");
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {  // recurrence for P_{j+1}(x)
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[n - 1 - i] = r.weights[i];
  }
  return cache.emplace(n, std::move(r)).first->second;
}

/// Maps the cached [-1,1] rule to [a,b].
inline void gauss_legendre_ab(int n, double a, double b, std::vector<double>& x,
                              std::vector<double>& w) {
  const Rule1D& r = gauss_legendre(n);
  x.resize(n);
  w.resize(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    x[i] = mid + half * r.nodes[i];
    w[i] = half * r.weights[i];
  }
}

/// Outcome of a refinement loop: value, Cauchy-difference error estimate,
/// whether the requested tolerance was met, and the final resolution.
template <class T>
struct Refined {
  T value{};
  double abs_error = 0.0;
  bool converged = false;
  int resolution = 0;
};

/// Doubles the resolution until |I(n) - I(n_prev)| <= abs_tol (or cap).
/// `grow` defaults to doubling; pass 1.5 for expensive high-dim integrands.
template <class F, class T = std::decay_t<decltype(std::declval<F>()(1))>>
Refined<T> refine_until(F eval, int n0, double abs_tol, int n_cap, double grow = 2.0) {
  Refined<T> out;
  int n = n0;
  T prev = eval(n);
  while (true) {
    const int next = std::max(n + 1, static_cast<int>(std::lround(n * grow)));
    if (next > n_cap) {
      out.value = prev;
      out.converged = false;
      out.resolution = n;
      return out;
    }
    const T cur = eval(next);
    out.abs_error = std::abs(cur - prev);
    out.value = cur;
    out.resolution = next;
    if (out.abs_error <= abs_tol) {
      out.converged = true;
      return out;
    }
    prev = cur;
    n = next;
  }
}

/// Equal-weight trapezoid average over one period [0, 2*pi); spectrally
/// accurate for smooth periodic integrands.
template <class F>
auto periodic_average(F f, int n) -> decltype(f(0.0)) {
  decltype(f(0.0)) acc{};
  for (int i = 0; i < n; ++i) acc += f(2.0 * M_PI * i / n);
  return acc * (1.0 / n);
}

}  // namespace ranklab
