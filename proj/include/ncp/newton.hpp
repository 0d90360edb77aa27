#pragma once

#include <cmath>
#include <complex>
#include <optional>

namespace ncp::detail {

struct NewtonOptions {
  int max_iterations = 100;
  double tolerance = 1e-12;  // on |residual|
};

// Complex Newton iteration for h(w) = 0 from w0. Returns nullopt when the
// residual does not reach the tolerance within the iteration budget.
template <typename H, typename DH>
std::optional<std::complex<double>> newton(H&& h, DH&& dh, std::complex<double> w0,
                                           NewtonOptions opt = {}) {
  std::complex<double> w = w0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const std::complex<double> r = h(w);
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) return std::nullopt;
    if (std::abs(r) <= opt.tolerance) return w;
    const std::complex<double> d = dh(w);
    if (std::abs(d) == 0.0) return std::nullopt;
    w -= r / d;
  }
  if (std::abs(h(w)) <= opt.tolerance) return w;
  return std::nullopt;
}

// Solves h(w; z) = 0 at the target z by continuation from z + i*lift, where a
// starting guess is reliable, down to z. Each stage starts from the previous
// solution. `solve(z, w0)` performs the Newton solve at one stage.
template <typename Solve>
std::optional<std::complex<double>> continuation(Solve&& solve, std::complex<double> z,
                                                 std::complex<double> w_far,
                                                 double lift = 100.0, int stages = 200) {
  std::complex<double> w = w_far;
  for (int s = 0; s <= stages; ++s) {
    const double frac = 1.0 - static_cast<double>(s) / stages;
    const std::complex<double> zs = z + std::complex<double>(0.0, lift * frac * frac);
    auto next = solve(zs, w);
    if (!next) return std::nullopt;
    w = *next;
  }
  return w;
}

}  // namespace ncp::detail
