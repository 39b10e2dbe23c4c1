#include "vit/spatial.hpp"

#include <cmath>
#include <numeric>

#include "vit/error.hpp"
#include "vit/oracle.hpp"
#include "vit/quadrature.hpp"

namespace vit {

using detail::require;

CouplingDistribution CouplingDistribution::standing_wave(double eta_max, int nodes) {
  require(eta_max >= 0.0, "eta_max must be nonnegative");
  require(nodes >= 1, "standing-wave average needs at least one node");
  const QuadratureRule rule = gauss_legendre(nodes, 0.0, units::kPi / 2.0);
  CouplingDistribution dist;
  dist.eta_max = eta_max;
  dist.eta.reserve(nodes);
  dist.weight.reserve(nodes);
  for (int k = 0; k < nodes; ++k) {
    const double c = std::cos(rule.nodes[k]);
    dist.eta.push_back(eta_max * c * c);
    dist.weight.push_back(rule.weights[k] / (units::kPi / 2.0));
  }
  return dist;
}

CouplingDistribution CouplingDistribution::point(double eta) {
  require(eta >= 0.0, "eta must be nonnegative");
  return {eta, {eta}, {1.0}};
}

void CouplingDistribution::validate() const {
  require(!eta.empty() && eta.size() == weight.size(), "coupling distribution is malformed");
  double total = 0.0;
  for (std::size_t k = 0; k < eta.size(); ++k) {
    require(weight[k] >= 0.0, "coupling weights must be nonnegative");
    require(eta[k] >= 0.0 && eta[k] <= eta_max * (1.0 + 1e-12),
            "coupling values must lie in [0, eta_max]");
    total += weight[k];
  }
  require(std::abs(total - 1.0) < 1e-9, "coupling weights must sum to 1");
}

void SideChannel::validate() const {
  require(weight >= 0.0 && weight <= 1.0, "side-channel weight must lie in [0, 1]");
  require(std::isfinite(zeeman_shift), "side-channel shift must be finite");
}

double effective_cooperativity(double eta_eff_0, double n_c) {
  require(eta_eff_0 >= 0.0 && n_c >= 0.0, "eta_eff_0 and n_c must be nonnegative");
  return eta_eff_0 * (n_c + 1.0);
}

double averaged_transmission(const PhysicalConfig& cfg, const CouplingDistribution& dist,
                             const Detunings& det) {
  dist.validate();
  std::vector<double> terms(dist.eta.size());
  for (std::size_t k = 0; k < dist.eta.size(); ++k) {
    terms[k] = dist.weight[k] * transmission(cfg, dist.eta[k], det);
  }
  return compensated_sum(terms);
}

Susceptibility composite_susceptibility(const PhysicalConfig& cfg, double eta,
                                        const Detunings& det, const SideChannel& side) {
  side.validate();
  const Susceptibility main = susceptibility(cfg, eta, det);
  if (side.weight == 0.0) return main;
  const Detunings shifted{det.delta_probe, det.delta_cavity + side.zeeman_shift};
  const Susceptibility extra = susceptibility(cfg, eta, shifted);
  const double norm = 1.0 + side.weight;
  return {main.value / norm + side.weight * extra.value / norm};
}

double jitter_broadened_value(const SpectrumFunction& spectrum_fn, double sigma_cavity,
                              const Detunings& det, int nodes, double tolerance) {
  require(sigma_cavity >= 0.0, "jitter width must be nonnegative");
  require(nodes >= 2, "jitter quadrature needs at least two nodes");
  if (sigma_cavity == 0.0) return spectrum_fn(det);

  auto average = [&](int n) {
    const QuadratureRule rule = gauss_hermite_normal(n);
    std::vector<double> terms(n);
    for (int k = 0; k < n; ++k) {
      const Detunings d{det.delta_probe, det.delta_cavity + sigma_cavity * rule.nodes[k]};
      terms[k] = rule.weights[k] * spectrum_fn(d);
    }
    return compensated_sum(terms);
  };
  const double fine = average(nodes);
  const double coarse = average(nodes / 2);
  if (std::abs(fine - coarse) > tolerance) {
    throw ConvergenceError("jitter quadrature not converged at " + std::to_string(nodes) +
                           " nodes");
  }
  return fine;
}

std::vector<double> jitter_broadened_spectrum(const SpectrumFunction& spectrum_fn,
                                              double sigma_cavity,
                                              const std::vector<double>& probe_grid,
                                              double delta_cavity, int nodes,
                                              double tolerance) {
  std::vector<double> out;
  out.reserve(probe_grid.size());
  for (double delta : probe_grid) {
    out.push_back(jitter_broadened_value(spectrum_fn, sigma_cavity, {delta, delta_cavity},
                                         nodes, tolerance));
  }
  return out;
}

SpectrumModel::SpectrumModel(PhysicalConfig cfg, double eta, ModelOptions opts,
                             double emission_scale)
    : cfg_(cfg), eta_(eta), opts_(std::move(opts)), emission_scale_(emission_scale) {
  cfg_.validate();
  require(eta_ >= 0.0 && std::isfinite(eta_), "cooperativity must be nonnegative");
  require(emission_scale_ > 0.0, "emission scale must be positive");
  if (opts_.side_channel) opts_.side_channel->validate();

  const CouplingDistribution dist = opts_.standing_wave
                                        ? CouplingDistribution::standing_wave(
                                              eta_, opts_.standing_wave_nodes)
                                        : CouplingDistribution::point(eta_);
  std::vector<double> shifts{0.0};
  std::vector<double> shift_weights{1.0};
  if (opts_.jitter && opts_.jitter->fwhm > 0.0) {
    const QuadratureRule rule = gauss_hermite_normal(opts_.jitter->nodes);
    shifts.clear();
    for (double x : rule.nodes) shifts.push_back(opts_.jitter->sigma() * x);
    shift_weights = rule.weights;
  }
  nodes_.reserve(dist.eta.size() * shifts.size());
  for (std::size_t a = 0; a < dist.eta.size(); ++a) {
    for (std::size_t b = 0; b < shifts.size(); ++b) {
      nodes_.push_back({dist.weight[a] * shift_weights[b], dist.eta[a], shifts[b]});
    }
  }
}

SpectrumSample SpectrumModel::at(const Detunings& det) const {
  const double kl = cfg_.wavenumber() * cfg_.ensemble_length;
  const double side_w = opts_.side_channel ? opts_.side_channel->weight : 0.0;
  const double main_frac = 1.0 / (1.0 + side_w);
  const double side_frac = side_w / (1.0 + side_w);

  double transmitted = 0.0;
  double emitted = 0.0;
  for (const Node& node : nodes_) {
    const Detunings d{det.delta_probe, det.delta_cavity + node.cavity_shift};
    const double im_main = main_frac * susceptibility(cfg_, node.eta, d).value.imag();
    double im_total = im_main;
    double routed = im_main > 0.0 ? im_main * branching_ratio_at(cfg_, node.eta, d) : 0.0;
    if (side_w > 0.0) {
      const Detunings ds{d.delta_probe, d.delta_cavity + opts_.side_channel->zeeman_shift};
      const double im_side = side_frac * susceptibility(cfg_, node.eta, ds).value.imag();
      im_total += im_side;
      if (im_side > 0.0) routed += im_side * branching_ratio_at(cfg_, node.eta, ds);
    }
    const double t = std::exp(-kl * im_total);
    transmitted += node.weight * t;
    if (im_total > 0.0) emitted += node.weight * (1.0 - t) * routed / im_total;
  }
  return {transmitted, emission_scale_ * emitted};
}

std::vector<MediumBranch> SpectrumModel::branches(double delta_cavity) const {
  std::vector<MediumBranch> out;
  out.reserve(nodes_.size());
  const PhysicalConfig cfg = cfg_;
  const std::optional<SideChannel> side = opts_.side_channel;
  for (const Node& node : nodes_) {
    const double eta = node.eta;
    const double cavity = delta_cavity + node.cavity_shift;
    out.push_back({node.weight, [cfg, side, eta, cavity](double delta_probe) {
                     const Detunings d{delta_probe, cavity};
                     const Susceptibility chi = side ? composite_susceptibility(cfg, eta, d, *side)
                                                     : susceptibility(cfg, eta, d);
                     return transfer_amplitude(chi, cfg);
                   }});
  }
  return out;
}

}  // namespace vit
