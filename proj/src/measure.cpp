#include "ncp/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ncp/errors.hpp"

namespace ncp {
namespace {

constexpr double kMassSlack = 1e-12;

void check_weight(double w) {
  if (!std::isfinite(w) || w < 0.0)
    throw ValidationError("atom weight must be finite and positive, got " +
                          std::to_string(w));
}

void check_total(double total, Role role, double state_upper, bool exact_one) {
  if (role == Role::parameter) return;
  if (total <= 0.0)
    throw ValidationError("state measure must have non-zero mass");
  if (exact_one) {
    if (std::abs(total - 1.0) > kMassSlack)
      throw ValidationError("circle state measure must have mass 1, got " +
                            std::to_string(total));
  } else if (total > state_upper + kMassSlack) {
    throw ValidationError("state measure mass exceeds 1: " +
                          std::to_string(total));
  }
}

}  // namespace

FiniteAtomicMeasure::FiniteAtomicMeasure(std::vector<Atom> atoms, Role role)
    : role_(role) {
  for (const auto& a : atoms) {
    if (!std::isfinite(a.position))
      throw ValidationError("atom position must be finite");
    check_weight(a.weight);
  }
  std::erase_if(atoms, [](const Atom& a) { return a.weight == 0.0; });
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.position < b.position; });
  for (const auto& a : atoms) {
    if (!atoms_.empty() &&
        a.position - atoms_.back().position <= kAtomMergeTolerance) {
      auto& last = atoms_.back();
      const double w = last.weight + a.weight;
      last.position = (last.weight * last.position + a.weight * a.position) / w;
      last.weight = w;
    } else {
      atoms_.push_back(a);
    }
  }
  double total = 0.0;
  for (const auto& a : atoms_) total += a.weight;
  check_total(total, role_, 1.0, false);
}

FiniteAtomicMeasure FiniteAtomicMeasure::dirac(double position, double weight,
                                               Role role) {
  return FiniteAtomicMeasure({{position, weight}}, role);
}

FiniteAtomicMeasure FiniteAtomicMeasure::zero() {
  return FiniteAtomicMeasure({}, Role::parameter);
}

std::vector<double> FiniteAtomicMeasure::positions() const {
  std::vector<double> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) out.push_back(a.position);
  return out;
}

std::vector<double> FiniteAtomicMeasure::weights() const {
  std::vector<double> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) out.push_back(a.weight);
  return out;
}

double mass(const FiniteAtomicMeasure& mu) {
  return mu.integrate([](double) { return 1.0; });
}

double first_moment(const FiniteAtomicMeasure& mu) {
  return mu.integrate([](double x) { return x; });
}

double second_moment(const FiniteAtomicMeasure& mu) {
  return mu.integrate([](double x) { return x * x; });
}

double generalized_variance(const FiniteAtomicMeasure& mu) {
  // Centered form avoids cancellation: sum_{i<j} w_i w_j (x_i - x_j)^2.
  const auto& a = mu.atoms();
  double v = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double d = a[i].position - a[j].position;
      v += a[i].weight * a[j].weight * d * d;
    }
  return v;
}

FiniteAtomicMeasure dilate(const FiniteAtomicMeasure& mu, double s) {
  if (s == 0.0 || !std::isfinite(s))
    throw ValidationError("dilation factor must be finite and non-zero");
  std::vector<Atom> out;
  out.reserve(mu.size());
  for (const auto& a : mu.atoms()) out.push_back({s * a.position, a.weight});
  return FiniteAtomicMeasure(std::move(out), mu.role());
}

FiniteAtomicMeasure translate(const FiniteAtomicMeasure& mu, double a) {
  std::vector<Atom> out;
  out.reserve(mu.size());
  for (const auto& at : mu.atoms()) out.push_back({at.position + a, at.weight});
  return FiniteAtomicMeasure(std::move(out), mu.role());
}

FiniteAtomicMeasure scale_mass(const FiniteAtomicMeasure& mu, double c) {
  if (!(c > 0.0)) throw ValidationError("mass scale must be positive");
  std::vector<Atom> out;
  out.reserve(mu.size());
  for (const auto& at : mu.atoms()) out.push_back({at.position, c * at.weight});
  return FiniteAtomicMeasure(std::move(out), mu.role());
}

CircleMeasure::CircleMeasure(std::vector<CircleAtom> atoms, Role role)
    : role_(role) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (auto& a : atoms) {
    if (!std::isfinite(a.angle))
      throw ValidationError("circle atom angle must be finite");
    check_weight(a.weight);
    a.angle = std::fmod(a.angle, two_pi);
    if (a.angle < 0.0) a.angle += two_pi;
    if (a.angle >= two_pi) a.angle = 0.0;
  }
  std::erase_if(atoms, [](const CircleAtom& a) { return a.weight == 0.0; });
  std::sort(atoms.begin(), atoms.end(),
            [](const auto& a, const auto& b) { return a.angle < b.angle; });
  for (const auto& a : atoms) {
    if (!atoms_.empty() && a.angle - atoms_.back().angle <= kAtomMergeTolerance) {
      atoms_.back().weight += a.weight;
    } else {
      atoms_.push_back(a);
    }
  }
  // Wrap-around: an atom just below 2 pi coincides with one at 0.
  if (atoms_.size() > 1 &&
      two_pi - atoms_.back().angle + atoms_.front().angle <= kAtomMergeTolerance) {
    atoms_.front().weight += atoms_.back().weight;
    atoms_.pop_back();
  }
  double total = 0.0;
  for (const auto& a : atoms_) total += a.weight;
  check_total(total, role_, 1.0, true);
}

CircleMeasure CircleMeasure::dirac(double angle, double weight, Role role) {
  return CircleMeasure({{angle, weight}}, role);
}

CircleMeasure CircleMeasure::zero() { return CircleMeasure({}, Role::parameter); }

CircleMeasure CircleMeasure::roots_of_unity(int n) {
  if (n < 1) throw ValidationError("roots_of_unity needs n >= 1");
  std::vector<CircleAtom> atoms;
  for (int j = 0; j < n; ++j)
    atoms.push_back({2.0 * std::numbers::pi * j / n, 1.0 / n});
  return CircleMeasure(std::move(atoms));
}

double mass(const CircleMeasure& mu) {
  double total = 0.0;
  for (const auto& a : mu.atoms()) total += a.weight;
  return total;
}

cplx circle_moment(const CircleMeasure& mu, int p) {
  cplx acc{};
  for (const auto& a : mu.atoms()) acc += a.weight * std::polar(1.0, p * a.angle);
  return acc;
}

}  // namespace ncp
