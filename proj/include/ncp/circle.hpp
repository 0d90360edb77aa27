#pragma once

#include <functional>
#include <vector>

#include "ncp/harness.hpp"
#include "ncp/measure.hpp"
#include "ncp/transforms.hpp"

namespace ncp {

// A(z) = z (i beta - integral (1 + zeta z)/(1 - zeta z) dsigma(zeta))
struct CircleGenerator {
  double beta = 0.0;
  CircleMeasure sigma = CircleMeasure::zero();

  CircleGenerator() = default;
  CircleGenerator(double beta, CircleMeasure sigma);

  cplx operator()(cplx z) const;
  double sigma_mass() const { return mass(sigma); }
};

// integral (1 + zeta z)/(1 - zeta z) dsigma(zeta)
cplx herglotz_integral(const CircleMeasure& sigma, cplx z);

// eta values on the 16 points {0.4 e^{2 pi i j/8}} then {0.2 e^{2 pi i j/8}}.
struct DiskGrid {
  ComplexVector points;
  ComplexVector values;
};

const ComplexVector& disk_points();
DiskGrid sample_disk(const std::function<cplx(cplx)>& eta,
                     const ComplexVector& points = disk_points());

// max over the grid of |eta_a - eta_b|; grids must share points.
double eta_distance(const DiskGrid& a, const DiskGrid& b);

cplx psi(const CircleMeasure& mu, cplx z);
cplx eta(const CircleMeasure& mu, cplx z);
cplx eta_derivative(const CircleMeasure& mu, cplx z);
DiskGrid eta_grid(const CircleMeasure& mu);

cplx circle_mean(const CircleMeasure& mu);

// Sigma(z) = eta^{-1}(z)/z for |z| <= 0.2 |mean|. Throws ZeroMean.
cplx sigma_transform(const CircleMeasure& mu, cplx z);

DiskGrid mult_boolean(const CircleMeasure& mu, const CircleMeasure& nu);
DiskGrid mult_monotone(const CircleMeasure& mu, const CircleMeasure& nu);
// Solves eta_mu(a) = eta_nu(b) = w, a b = z w by Newton in the scaled unknowns
// a = z alpha, b = z beta, w = z omega, continued along the radius from
// (alpha, beta, omega) = (mean_nu, mean_mu, mean_mu mean_nu). Throws ZeroMean.
cplx mult_free_at(const CircleMeasure& mu, const CircleMeasure& nu, cplx z);
DiskGrid mult_free(const CircleMeasure& mu, const CircleMeasure& nu);

// eta(z) = gamma z exp(-integral (1 + zeta z)/(1 - zeta z) dsigma)
cplx circle_boolean_idiv_at(cplx gamma, const CircleMeasure& sigma, cplx z);
DiskGrid circle_boolean_idiv(cplx gamma, const CircleMeasure& sigma);

// eta with eta^{-1}(w) = w conj(gamma) exp(integral (1 + zeta w)/(1 - zeta w) dsigma),
// so the mean is gamma e^{-sigma(T)}.
cplx circle_free_idiv_at(cplx gamma, const CircleMeasure& sigma, cplx z);
DiskGrid circle_free_idiv(cplx gamma, const CircleMeasure& sigma);

// gamma^p exp(integral (zeta^p - 1 - i p Im zeta)/(1 - Re zeta) dsigma).
// The integrand at zeta = 1 is extended by -p^2.
cplx circle_classical_idiv_fourier(cplx gamma, const CircleMeasure& sigma, int p);

// ---- Flow ------------------------------------------------------------------

// RK4 on d eta/dt = A(eta) from eta_0(z) = z. Throws NumericalError when
// |eta_t(z)| > |z|.
cplx circle_flow_at(const CircleGenerator& A, cplx z, double t,
                    double step = kDefaultFlowStep);

struct CircleFlowResult {
  std::vector<double> times;     // {0, t/2, t}
  std::vector<DiskGrid> grids;
  std::vector<cplx> means;       // exp((i beta - sigma(T)) t)
  double step_size = kDefaultFlowStep;
};

CircleFlowResult circle_monotone_flow(const CircleGenerator& A, double t_end,
                                      double step = kDefaultFlowStep);

// eta'(0) by central differences at radius h along 1 and i.
cplx derivative_at_zero(const std::function<cplx(cplx)>& eta, double h = 1e-4);

// ---- Arrays ----------------------------------------------------------------

struct CircleRow {
  std::function<cplx(cplx)> eta;
  cplx mean;
};

enum class CircleFamily {
  flow,          // nu_{1/k_n} of the generator
  rotated_flow,  // e^{2 pi i r/k_n} times the flow row
  delta          // delta at e^{i beta/k_n}
};

std::string to_string(CircleFamily f);
CircleFamily parse_circle_family(const std::string& name);

struct CircleArraySpec {
  CircleFamily family = CircleFamily::flow;
  CircleGenerator generator;
  int rotation = 1;
  std::vector<int> n_values = {16, 32, 64, 128, 256};
  std::vector<int> k_values;
  double flow_step = kDefaultFlowStep;

  void validate() const;
  CircleRow row(int n) const;
  int k(int n) const;
};

// z (eta(z)/z)^k and eta^{ok}(z)
cplx boolean_circle_power(const CircleRow& row, int k, cplx z);
cplx monotone_circle_power(const CircleRow& row, int k, cplx z);

struct RotationReport {
  std::vector<int> ell;            // per n
  std::vector<bool> ambiguous;     // residual not below pi
  OperationReport uncorrected;     // monotone powers against nu^{beta,sigma}
  OperationReport corrected;
};

// ell_n minimizes |k_n arg(mean_n) + 2 pi ell - beta|; lambda_n = e^{2 pi i ell_n/k_n}.
int detect_rotation(cplx mean, int k, double beta, bool* ambiguous = nullptr);

RotationReport rotation_correction(const CircleArraySpec& spec, const VerdictRule& rule = {});

struct BetaCheck {
  double value;  // k_N Im(mean_N)
  bool holds;    // |value - beta| <= tolerance
};

BetaCheck beta_condition_check(const CircleArraySpec& spec, double beta, double tolerance = 0.05);

struct CircleEquivalence {
  BetaCheck beta;
  OperationReport boolean;
  OperationReport monotone;
  bool verdicts_agree;
};

CircleEquivalence circle_equivalence(const CircleArraySpec& spec, const CircleGenerator& limit,
                                     const VerdictRule& rule = {});

}  // namespace ncp
