#include "vit/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "vit/error.hpp"
#include "vit/physics.hpp"

namespace vit {

using detail::require;

void Spectrum::validate() const {
  require(detuning.size() == value.size(), "spectrum columns differ in length");
  require(sigma.empty() || sigma.size() == value.size(), "sigma column length mismatch");
  for (double s : sigma) require(s > 0.0, "spectrum uncertainties must be positive");
}

double poisson_sigma(double counts) { return std::sqrt(std::max(counts, 1.0)); }

namespace {

double weight_of(const Spectrum& s, std::size_t i) { return s.sigma.empty() ? 1.0 : 1.0 / s.sigma[i]; }

}  // namespace

// ---- Lorentzian ------------------------------------------------------------

double lorentzian_line(double x, double center, double fwhm, double depth, double baseline) {
  const double u = 2.0 * (x - center) / fwhm;
  return baseline * std::exp(-depth / (1.0 + u * u));
}

FitResult fit_lorentzian(const Spectrum& spectrum, const LmOptions& options) {
  spectrum.validate();
  require(spectrum.size() >= 8, "Lorentzian fit needs at least 8 points");

  const auto [lo_it, hi_it] = std::minmax_element(spectrum.value.begin(), spectrum.value.end());
  const std::size_t i_min = static_cast<std::size_t>(lo_it - spectrum.value.begin());
  const double baseline0 = std::max({spectrum.value.front(), spectrum.value.back(), *hi_it});
  require(baseline0 > 0.0, "Lorentzian fit needs a positive baseline");
  const double depth0 = std::max(0.0, -std::log(std::max(*lo_it, 1e-300) / baseline0));
  const double center0 = spectrum.detuning[i_min];

  // Half-absorbance crossings bracket the FWHM.
  const double half = baseline0 * std::exp(-0.5 * depth0);
  std::size_t left = i_min;
  std::size_t right = i_min;
  while (left > 0 && spectrum.value[left] < half) --left;
  while (right + 1 < spectrum.size() && spectrum.value[right] < half) ++right;
  const double span = spectrum.detuning.back() - spectrum.detuning.front();
  double fwhm0 = spectrum.detuning[right] - spectrum.detuning[left];
  if (!(fwhm0 > 0.0)) fwhm0 = std::abs(span) / 4.0;

  LeastSquaresProblem problem;
  problem.names = {"center", "fwhm", "depth", "baseline"};
  problem.typical_scale = {std::abs(fwhm0), std::abs(fwhm0), 1e-3, 1e-3};
  problem.lower = {-std::numeric_limits<double>::infinity(), 1e-9 * std::abs(fwhm0), 0.0, 0.0};
  problem.residual_count = spectrum.size();
  problem.residuals = [&spectrum](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
      const double model = lorentzian_line(spectrum.detuning[i], p(0), p(1), p(2), p(3));
      r(static_cast<Eigen::Index>(i)) = (spectrum.value[i] - model) * weight_of(spectrum, i);
    }
  };
  Eigen::VectorXd start(4);
  start << center0, fwhm0, depth0, baseline0;
  return levenberg_marquardt(problem, start, options);
}

// ---- VIT fit -----------------------------------------------------------------

namespace {

struct VitParams {
  double eta_eff, od, scale_d2, delta_offset, probe_offset;
};

SpectrumModel make_model(const VitFitSetup& setup, const VitParams& v) {
  PhysicalConfig cfg = setup.cfg;
  cfg.od = std::max(v.od, 0.0);
  return SpectrumModel(cfg, std::max(v.eta_eff, 0.0), setup.model, 1.0);
}

std::size_t residual_count(const std::vector<VitDataset>& datasets) {
  std::size_t n = 0;
  for (const VitDataset& d : datasets) n += d.d1.size() + (d.d2 ? d.d2->size() : 0);
  return n;
}

bool has_d2(const std::vector<VitDataset>& datasets) {
  return std::any_of(datasets.begin(), datasets.end(), [](const VitDataset& d) { return d.d2.has_value(); });
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Scale for D2 that best matches the data at fixed model shape.
double best_scale_d2(const std::vector<VitDataset>& datasets, const SpectrumModel& model,
                     const VitParams& v) {
  double num = 0.0;
  double den = 0.0;
  for (const VitDataset& d : datasets) {
    if (!d.d2) continue;
    for (std::size_t i = 0; i < d.d2->size(); ++i) {
      const double m =
          model.at({d.d2->detuning[i] + v.probe_offset, d.delta_cavity + v.delta_offset}).cavity_emission;
      const double w = weight_of(*d.d2, i);
      num += d.d2->value[i] * m * w * w;
      den += m * m * w * w;
    }
  }
  return den > 0.0 && num > 0.0 ? num / den : 1.0;
}

}  // namespace

std::vector<double> vit_initial_guess(const std::vector<VitDataset>& datasets,
                                      const VitFitSetup& setup) {
  require(!datasets.empty(), "VIT fit needs at least one dataset");
  VitParams v{setup.eta_eff, setup.od, setup.scale_d2, setup.delta_offset, setup.probe_offset};

  if (std::isnan(v.od)) {
    double lowest = 1.0;
    for (const VitDataset& d : datasets) {
      for (double t : d.d1.value) lowest = std::min(lowest, t);
    }
    v.od = lowest > 0.0 ? std::max(0.0, -std::log(lowest)) : 5.0;
  }

  if (std::isnan(v.eta_eff)) {
    std::vector<double> guesses;
    const double window = units::mhz_to_angular(1.0);
    for (const VitDataset& d : datasets) {
      double best_t = -1.0;
      double best_x = 0.0;
      for (std::size_t i = 0; i < d.d1.size(); ++i) {
        const double x = d.d1.detuning[i] + v.probe_offset;
        if (std::abs(x - d.delta_cavity - v.delta_offset) <= window && d.d1.value[i] > best_t) {
          best_t = d.d1.value[i];
          best_x = x;
        }
      }
      if (best_t <= 0.0 || v.od <= 0.0) continue;
      // On two-photon resonance: -ln T = OD u / (a^2 + u^2), u = 1 + eta.
      const double absorbance = -std::log(std::min(best_t, 1.0 - 1e-12));
      const double a = 2.0 * best_x / setup.cfg.gamma;
      const double disc = v.od * v.od - 4.0 * absorbance * absorbance * a * a;
      const double u = disc > 0.0 ? (v.od + std::sqrt(disc)) / (2.0 * absorbance)
                                  : v.od / (2.0 * absorbance);
      guesses.push_back(std::clamp(u - 1.0, 0.1, 1e3));
    }
    v.eta_eff = guesses.empty() ? 1.0 : median(guesses);
    if (setup.model.standing_wave) v.eta_eff *= 2.0;
  }

  if (std::isnan(v.scale_d2)) {
    v.scale_d2 = has_d2(datasets) ? best_scale_d2(datasets, make_model(setup, v), v) : 1.0;
  }
  return {v.eta_eff, v.od, v.scale_d2, v.delta_offset, v.probe_offset};
}

namespace {

FitResult fit_vit_pass(const std::vector<VitDataset>& datasets, const VitFitSetup& setup) {
  require(!datasets.empty(), "VIT fit needs at least one dataset");
  for (const VitDataset& d : datasets) {
    d.d1.validate();
    if (d.d2) d.d2->validate();
  }
  const std::vector<double> init = vit_initial_guess(datasets, setup);

  const bool d2_present = has_d2(datasets);
  const std::array<bool, 5> free = {setup.free.eta_eff, setup.free.od,
                                    setup.free.scale_d2 && d2_present, setup.free.delta_offset,
                                    setup.free.probe_offset};
  const double inf = std::numeric_limits<double>::infinity();
  const std::array<double, 5> typical = {1e-2, 1e-3, 1e-3, setup.cfg.kappa, setup.cfg.kappa};
  const std::array<double, 5> lower = {0.0, 0.0, 0.0, -inf, -inf};

  std::vector<int> map;
  LeastSquaresProblem problem;
  for (int k = 0; k < 5; ++k) {
    if (!free[k]) continue;
    map.push_back(k);
    problem.names.emplace_back(kVitParameterNames[k]);
    problem.typical_scale.push_back(typical[k]);
    problem.lower.push_back(lower[k]);
  }
  require(!map.empty(), "no free parameters in the VIT fit");
  problem.residual_count = residual_count(datasets);

  problem.residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    std::array<double, 5> all;
    std::copy(init.begin(), init.end(), all.begin());
    for (std::size_t j = 0; j < map.size(); ++j) all[map[j]] = p(static_cast<Eigen::Index>(j));
    const VitParams v{all[0], all[1], all[2], all[3], all[4]};
    const SpectrumModel model = make_model(setup, v);
    Eigen::Index row = 0;
    std::vector<double> emission;
    for (const VitDataset& d : datasets) {
      const double cavity = d.delta_cavity + v.delta_offset;
      const bool shared = d.d2 && d.d2->detuning == d.d1.detuning;
      emission.clear();
      for (std::size_t i = 0; i < d.d1.size(); ++i) {
        const SpectrumSample m = model.at({d.d1.detuning[i] + v.probe_offset, cavity});
        r(row++) = (d.d1.value[i] - m.transmission) * weight_of(d.d1, i);
        if (shared) emission.push_back(m.cavity_emission);
      }
      if (!d.d2) continue;
      for (std::size_t i = 0; i < d.d2->size(); ++i) {
        const double e = shared ? emission[i]
                                : model.at({d.d2->detuning[i] + v.probe_offset, cavity}).cavity_emission;
        r(row++) = (d.d2->value[i] - v.scale_d2 * e) * weight_of(*d.d2, i);
      }
    }
  };

  Eigen::VectorXd start(static_cast<Eigen::Index>(map.size()));
  for (std::size_t j = 0; j < map.size(); ++j) start(static_cast<Eigen::Index>(j)) = init[map[j]];
  return levenberg_marquardt(problem, start, setup.lm);
}

VitParams fitted_params(const FitResult& f, const std::vector<double>& init) {
  std::array<double, 5> all;
  std::copy(init.begin(), init.end(), all.begin());
  for (int k = 0; k < 5; ++k) {
    if (f.has(kVitParameterNames[k])) all[k] = f.value(kVitParameterNames[k]);
  }
  return {all[0], all[1], all[2], all[3], all[4]};
}

void set_model_sigma(Spectrum& s, double counts_per_unit, const std::vector<double>& expected) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.sigma[i] = poisson_sigma(expected[i] * counts_per_unit) / counts_per_unit;
  }
}

}  // namespace

FitResult fit_vit_spectra(const std::vector<VitDataset>& datasets, const VitFitSetup& setup) {
  FitResult first = fit_vit_pass(datasets, setup);
  const bool known = std::any_of(datasets.begin(), datasets.end(), [](const VitDataset& d) {
    return d.d1_counts_per_unit > 0.0 || (d.d2 && d.d2_counts_per_unit > 0.0);
  });
  if (!setup.model_variance || !known || !first.converged) return first;

  const VitParams v = fitted_params(first, vit_initial_guess(datasets, setup));
  const SpectrumModel model = make_model(setup, v);
  std::vector<VitDataset> reweighted = datasets;
  for (VitDataset& d : reweighted) {
    const double cavity = d.delta_cavity + v.delta_offset;
    if (d.d1_counts_per_unit > 0.0 && d.d1.sigma.size() == d.d1.size()) {
      std::vector<double> expected;
      for (double x : d.d1.detuning) expected.push_back(model.at({x + v.probe_offset, cavity}).transmission);
      set_model_sigma(d.d1, d.d1_counts_per_unit, expected);
    }
    if (d.d2 && d.d2_counts_per_unit > 0.0 && d.d2->sigma.size() == d.d2->size()) {
      std::vector<double> expected;
      for (double x : d.d2->detuning) {
        expected.push_back(v.scale_d2 * model.at({x + v.probe_offset, cavity}).cavity_emission);
      }
      set_model_sigma(*d.d2, d.d2_counts_per_unit, expected);
    }
  }
  VitFitSetup second = setup;
  second.eta_eff = v.eta_eff;
  second.od = v.od;
  second.scale_d2 = v.scale_d2;
  second.delta_offset = v.delta_offset;
  second.probe_offset = v.probe_offset;
  FitResult refit = fit_vit_pass(reweighted, second);
  refit.iterations += first.iterations;
  return refit;
}

// ---- Linear fit --------------------------------------------------------------

LinearFit fit_linear_weighted(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& sigma) {
  require(x.size() == y.size() && x.size() == sigma.size(), "linear fit columns differ in length");
  require(x.size() >= 2, "linear fit needs at least two points");
  double s = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(sigma[i] > 0.0, "linear fit uncertainties must be positive");
    const double w = 1.0 / (sigma[i] * sigma[i]);
    s += w;
    sx += w * x[i];
    sy += w * y[i];
    sxx += w * x[i] * x[i];
    sxy += w * x[i] * y[i];
  }
  const double det = s * sxx - sx * sx;
  if (!(det > 1e-14 * s * sxx)) throw DomainError("degenerate abscissa: all x values are equal");

  LinearFit fit;
  fit.points = x.size();
  fit.slope = (s * sxy - sx * sy) / det;
  fit.intercept = (sxx * sy - sx * sxy) / det;
  fit.slope_err = std::sqrt(s / det);
  fit.intercept_err = std::sqrt(sxx / det);
  fit.covariance = -sx / det;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double res = (y[i] - fit.slope * x[i] - fit.intercept) / sigma[i];
    fit.chi2 += res * res;
  }
  return fit;
}

LinearFit fit_linear_above(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& sigma, double threshold) {
  std::vector<double> xs, ys, ss;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > threshold) {
      xs.push_back(x[i]);
      ys.push_back(y[i]);
      ss.push_back(sigma.at(i));
    }
  }
  return fit_linear_weighted(xs, ys, ss);
}

Ratio ratio_with_error(double numerator, double numerator_err, double denominator,
                       double denominator_err, double covariance) {
  require(denominator != 0.0, "ratio with zero denominator");
  const double q = numerator / denominator;
  const double dn = 1.0 / denominator;
  const double dd = -numerator / (denominator * denominator);
  const double var = dn * dn * numerator_err * numerator_err +
                     dd * dd * denominator_err * denominator_err + 2.0 * dn * dd * covariance;
  return {q, std::sqrt(std::max(var, 0.0))};
}

// ---- Transparency -------------------------------------------------------------

namespace {

TransparencyEstimate transparency_from(double peak, double peak_err, double od, double od_error) {
  TransparencyEstimate est;
  est.peak_transmission = peak;
  est.reference_transmission = std::exp(-od);
  const double t = est.reference_transmission;
  est.theta = transparency(peak, t);
  const double d_peak = 1.0 / (1.0 - t);
  const double d_ref = (peak - 1.0) / ((1.0 - t) * (1.0 - t));
  const double d_od = d_ref * (-t);
  est.error = std::sqrt(d_peak * d_peak * peak_err * peak_err + d_od * d_od * od_error * od_error);
  return est;
}

}  // namespace

TransparencyEstimate extract_transparency(const Spectrum& d1, double delta_cavity, double od,
                                          double od_error, double window) {
  d1.validate();
  require(od > 0.0, "transparency needs a positive optical depth");
  double peak = -1.0;
  double peak_err = 0.0;
  for (std::size_t i = 0; i < d1.size(); ++i) {
    if (std::abs(d1.detuning[i] - delta_cavity) <= window && d1.value[i] > peak) {
      peak = d1.value[i];
      peak_err = d1.sigma.empty() ? 0.0 : d1.sigma[i];
    }
  }
  require(peak >= 0.0, "no spectrum points near two-photon resonance");
  return transparency_from(peak, peak_err, od, od_error);
}

double peak_transmission(const SpectrumModel& model, double delta_cavity, double window) {
  require(window > 0.0, "search window must be positive");
  constexpr int kScan = 201;
  auto t_at = [&](double x) { return model.at({x, delta_cavity}).transmission; };
  const double step = 2.0 * window / (kScan - 1);
  int best = 0;
  double best_t = -1.0;
  for (int i = 0; i < kScan; ++i) {
    const double t = t_at(delta_cavity - window + i * step);
    if (t > best_t) {
      best_t = t;
      best = i;
    }
  }
  double a = delta_cavity - window + std::max(best - 1, 0) * step;
  double b = delta_cavity - window + std::min(best + 1, kScan - 1) * step;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = t_at(c);
  double fd = t_at(d);
  for (int it = 0; it < 80 && (b - a) > 1e-9 * window; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = t_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = t_at(d);
    }
  }
  return std::max({best_t, fc, fd});
}

TransparencyEstimate extract_transparency(const SpectrumModel& model, double delta_cavity,
                                          double od_error, double window) {
  const double od = model.config().od;
  require(od > 0.0, "transparency needs a positive optical depth");
  return transparency_from(peak_transmission(model, delta_cavity, window), 0.0, od, od_error);
}

}  // namespace vit
