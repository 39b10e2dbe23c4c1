#include "vit/physics.hpp"

#include <cmath>
#include <string>

#include "vit/error.hpp"

namespace vit {

using detail::require;

void PhysicalConfig::validate() const {
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be positive");
  require(std::isfinite(kappa) && kappa > 0.0, "kappa must be positive");
  require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive");
  require(std::isfinite(od) && od >= 0.0, "od must be nonnegative");
  require(std::isfinite(ensemble_length) && ensemble_length > 0.0,
          "ensemble_length must be positive");
  require(f_probe > 0.0 && f_probe <= 1.0, "f_probe must lie in (0, 1]");
  require(f_cavity > 0.0 && f_cavity <= 1.0, "f_cavity must lie in (0, 1]");
}

void CavityGeometry::validate() const {
  require(std::isfinite(finesse) && finesse > 0.0, "finesse must be positive");
  require(std::isfinite(waist) && waist > 0.0, "waist must be positive");
  require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive");
}

Susceptibility susceptibility(const PhysicalConfig& cfg, double eta, const Detunings& det) {
  cfg.validate();
  require(std::isfinite(eta) && eta >= 0.0, "cooperativity must be nonnegative");
  require(std::isfinite(det.delta_probe) && std::isfinite(det.delta_cavity),
          "detunings must be finite");
  if (cfg.od == 0.0) return {cdouble(0.0, 0.0)};

  const double a = det.probe_normalized(cfg.gamma);
  const double b = det.two_photon_normalized(cfg.kappa);
  const double prefactor = -cfg.od / (cfg.wavenumber() * cfg.ensemble_length);

  const double num_re = a - (eta - a * b) * b;
  const double num_im = -(eta + 1.0 + b * b);
  const double d1 = eta + 1.0 - a * b;
  const double d2 = a + b;
  const double den = d1 * d1 + d2 * d2;
  return {cdouble(prefactor * num_re / den, prefactor * num_im / den)};
}

cdouble transfer_amplitude(const Susceptibility& chi, const PhysicalConfig& cfg) {
  cfg.validate();
  const double half_kl = 0.5 * cfg.wavenumber() * cfg.ensemble_length;
  return std::exp(cdouble(0.0, half_kl) * chi.value);
}

double transmission(const PhysicalConfig& cfg, double eta, const Detunings& det) {
  return std::norm(transfer_amplitude(susceptibility(cfg, eta, det), cfg));
}

double transfer_phase(const Susceptibility& chi, const PhysicalConfig& cfg) {
  return 0.5 * cfg.wavenumber() * cfg.ensemble_length * chi.value.real();
}

double refractive_index(const Susceptibility& chi) {
  const double arg = 1.0 + chi.value.real();
  require(arg >= 0.0, "1 + Re(chi) is negative; index undefined");
  return std::sqrt(arg);
}

double cooperativity_geometric(const CavityGeometry& geom) {
  geom.validate();
  const double k = units::kTwoPi / geom.lambda;
  return 24.0 * geom.finesse / (units::kPi * k * k * geom.waist * geom.waist);
}

double cooperativity_from_coupling(double g, double kappa, double gamma) {
  require(g > 0.0 && kappa > 0.0 && gamma > 0.0, "g, kappa, gamma must be positive");
  return 4.0 * g * g / (kappa * gamma);
}

double coupling_from_cooperativity(double eta, double kappa, double gamma) {
  require(eta >= 0.0 && kappa > 0.0 && gamma > 0.0,
          "eta must be nonnegative, kappa and gamma positive");
  return 0.5 * std::sqrt(eta * kappa * gamma);
}

double resonant_transmission(double od, double eta) {
  require(od >= 0.0, "od must be nonnegative");
  require(eta >= 0.0, "cooperativity must be nonnegative");
  return std::exp(-od / (eta + 1.0));
}

double group_delay_analytic(double od, double kappa, double eta) {
  require(kappa > 0.0, "kappa must be positive");
  require(od >= 0.0 && eta >= 0.0, "od and eta must be nonnegative");
  return (od / kappa) * eta / ((eta + 1.0) * (eta + 1.0));
}

double group_delay_exact(double od, double kappa, double gamma, double eta) {
  require(kappa > 0.0 && gamma > 0.0, "kappa and gamma must be positive");
  require(od >= 0.0 && eta >= 0.0, "od and eta must be nonnegative");
  return od * (eta / kappa - 1.0 / gamma) / ((eta + 1.0) * (eta + 1.0));
}

namespace {

double five_point_slope(const PhysicalConfig& cfg, double eta, const Detunings& at, double h) {
  auto phase = [&](double shift) {
    Detunings d = at;
    d.delta_probe += shift;
    return transfer_phase(susceptibility(cfg, eta, d), cfg);
  };
  return (-phase(2.0 * h) + 8.0 * phase(h) - 8.0 * phase(-h) + phase(-2.0 * h)) / (12.0 * h);
}

}  // namespace

NumericDelay group_delay_numeric(const PhysicalConfig& cfg, double eta, double step,
                                 const Detunings& at, double rel_tolerance) {
  cfg.validate();
  require(eta >= 0.0, "cooperativity must be nonnegative");
  const double h = step > 0.0 ? step : cfg.kappa / 100.0;
  if (h > cfg.kappa * (1.0 + eta)) {
    throw DomainError("finite-difference step exceeds the transparency window width");
  }

  const double coarse = five_point_slope(cfg, eta, at, h);
  const double fine = five_point_slope(cfg, eta, at, 0.5 * h);
  // O(h^4) stencil: one Richardson step removes the leading error term.
  const double extrapolated = (16.0 * fine - coarse) / 15.0;
  const double gap = std::abs(extrapolated - fine);
  if (gap > rel_tolerance * std::abs(extrapolated) && gap > 1e-18) {
    throw ConvergenceError("group delay stencils disagree by " + std::to_string(gap) + " s");
  }
  return {extrapolated, gap};
}

double group_velocity(double delay, double path_length) {
  require(delay > 0.0, "delay must be positive");
  return path_length / delay;
}

double transparency(double t_with, double t_without) {
  require(t_without < 1.0, "reference transmission must be below 1");
  return (t_with - t_without) / (1.0 - t_without);
}

double transparency_window_width(double eta, double kappa) {
  require(eta >= 0.0, "cooperativity must be nonnegative");
  return (1.0 + eta) * kappa;
}

std::vector<double> fock_delay_ladder(const PhysicalConfig& cfg, double eta_vacuum, int n_max) {
  cfg.validate();
  require(n_max >= 0, "n_max must be nonnegative");
  require(eta_vacuum >= 0.0, "cooperativity must be nonnegative");
  std::vector<double> delays;
  delays.reserve(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    delays.push_back(group_delay_analytic(cfg.od, cfg.kappa, eta_vacuum * (n + 1)));
  }
  return delays;
}

}  // namespace vit
