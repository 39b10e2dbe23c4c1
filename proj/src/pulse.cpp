#include "vit/pulse.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "vit/error.hpp"

namespace vit {

using detail::require;

namespace {

// FFTW's planner is not reentrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlan {
 public:
  FftPlan(std::size_t n, int sign) : n_(n) {
    std::vector<cdouble> scratch(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan_ == nullptr) throw std::runtime_error("FFTW planning failed");
  }
  ~FftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void execute(std::vector<cdouble>& data) const {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan_, buf, buf);
  }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  fftw_plan plan_ = nullptr;
};

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Angular frequency of FFT bin k in FFTW's ordering.
double bin_frequency(std::size_t k, std::size_t n, double dt) {
  const auto signed_k = k < n / 2 ? static_cast<double>(k)
                                  : static_cast<double>(k) - static_cast<double>(n);
  return units::kTwoPi * signed_k / (static_cast<double>(n) * dt);
}

// Envelope spectrum with the e^{+i nu t} sign, so that t(nu) = e^{i nu tau}
// delays by tau.
std::vector<cdouble> analyse(const SampledPulse& pulse, const FftPlan& plan) {
  std::vector<cdouble> spectrum = pulse.samples;
  plan.execute(spectrum);
  return spectrum;
}

std::vector<cdouble> sample_transfer(const TransferFunction& medium, const SampledPulse& pulse) {
  const std::size_t n = pulse.samples.size();
  std::vector<cdouble> t(n);
  for (std::size_t k = 0; k < n; ++k) {
    t[k] = medium(pulse.carrier_detuning + bin_frequency(k, n, pulse.dt));
    if (!std::isfinite(t[k].real()) || !std::isfinite(t[k].imag())) {
      throw DomainError("transfer function is not finite over the pulse band");
    }
  }
  // Outer 1% of the band on each side must be flat: the response has to
  // have reached its asymptote before the grid edge.
  const std::size_t edge_bins = std::max<std::size_t>(2, n / 200);
  const double top = std::abs(t[n / 2 - 1]);
  const double bottom = std::abs(t[n / 2]);
  double worst = std::abs(top - bottom);
  for (std::size_t j = 0; j < edge_bins; ++j) {
    worst = std::max(worst, std::abs(std::abs(t[n / 2 - 1 - j]) - top));
    worst = std::max(worst, std::abs(std::abs(t[n / 2 + j]) - bottom));
  }
  if (worst > 1e-6) {
    throw DomainError("transfer function not flat at the band edge (variation " +
                      std::to_string(worst) + "); refine the time step");
  }
  return t;
}

std::vector<cdouble> synthesise(const std::vector<cdouble>& spectrum,
                                const std::vector<cdouble>& transfer, const FftPlan& inverse) {
  const std::size_t n = spectrum.size();
  std::vector<cdouble> out(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = spectrum[k] * transfer[k] * scale;
  inverse.execute(out);
  return out;
}

double parabolic_peak_time(std::span<const double> time, std::span<const double> intensity) {
  const auto it = std::max_element(intensity.begin(), intensity.end());
  const auto i = static_cast<std::size_t>(it - intensity.begin());
  const double dt = time.size() > 1 ? time[1] - time[0] : 0.0;
  if (i == 0 || i + 1 >= intensity.size()) return time[i];
  const double ym = intensity[i - 1];
  const double y0 = intensity[i];
  const double yp = intensity[i + 1];
  const double curvature = ym - 2.0 * y0 + yp;
  if (curvature == 0.0) return time[i];
  return time[i] + 0.5 * dt * (ym - yp) / curvature;
}

double centroid_time(std::span<const double> time, std::span<const double> intensity) {
  double moment = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < time.size(); ++i) {
    moment += time[i] * intensity[i];
    total += intensity[i];
  }
  if (!(total > 0.0)) throw DomainError("zero-energy pulse has no delay");
  return moment / total;
}

std::vector<double> grid_times(const SampledPulse& p) {
  std::vector<double> t(p.samples.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = p.time(i);
  return t;
}

}  // namespace

std::vector<double> SampledPulse::intensity() const {
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = std::norm(samples[i]);
  return out;
}

double SampledPulse::energy() const {
  double sum = 0.0;
  for (const cdouble& s : samples) sum += std::norm(s);
  return sum * dt;
}

double gaussian_envelope(const PulseSpec& spec, double t) {
  const double x = t / spec.duration;
  switch (spec.width) {
    case PulseWidth::IntensityFwhm:
      return std::exp(-2.0 * std::log(2.0) * x * x);
    case PulseWidth::IntensityOneOverESquared:
      return std::exp(-4.0 * x * x);
  }
  return 0.0;
}

SampledPulse sample_pulse(const std::function<cdouble(double)>& envelope, double dt,
                          std::size_t samples, double carrier_detuning) {
  require(dt > 0.0, "time step must be positive");
  require(is_power_of_two(samples), "sample count must be a power of two");
  SampledPulse p;
  p.dt = dt;
  p.t0 = -0.5 * static_cast<double>(samples - 1) * dt;
  p.carrier_detuning = carrier_detuning;
  p.samples.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) p.samples[i] = envelope(p.time(i));
  return p;
}

SampledPulse make_gaussian_pulse(const PulseSpec& spec, const GridConfig& grid) {
  require(spec.duration > 0.0, "pulse duration must be positive");
  require(is_power_of_two(grid.samples), "sample count must be a power of two");
  const double span = grid.span > 0.0 ? grid.span : 16.0 * spec.duration;
  if (span < 8.0 * spec.duration) throw DomainError("time grid shorter than 8 pulse durations");
  const double dt = span / static_cast<double>(grid.samples);

  // Intensity spectrum FWHM of a Gaussian: 0.441/T in Hz for an intensity-FWHM T.
  const double fwhm_intensity = spec.width == PulseWidth::IntensityFwhm
                                    ? spec.duration
                                    : spec.duration * std::sqrt(std::log(2.0) / 2.0);
  const double spectral_fwhm = units::kTwoPi * 2.0 * std::log(2.0) / units::kPi / fwhm_intensity;
  const double nyquist = units::kPi / dt;
  if (nyquist < 10.0 * spectral_fwhm) {
    throw DomainError("time grid too coarse for the pulse bandwidth");
  }
  return sample_pulse([&](double t) { return cdouble(gaussian_envelope(spec, t), 0.0); }, dt,
                      grid.samples, spec.carrier_detuning);
}

SampledPulse propagate(const SampledPulse& pulse, const TransferFunction& medium) {
  const std::size_t n = pulse.samples.size();
  require(is_power_of_two(n), "sample count must be a power of two");
  const FftPlan forward(n, FFTW_BACKWARD);  // e^{+i nu t}
  const FftPlan inverse(n, FFTW_FORWARD);
  const std::vector<cdouble> spectrum = analyse(pulse, forward);
  SampledPulse out = pulse;
  out.samples = synthesise(spectrum, sample_transfer(medium, pulse), inverse);
  return out;
}

DelayEstimate extract_delay(std::span<const double> time, std::span<const double> input_intensity,
                            std::span<const double> output_intensity) {
  require(time.size() == input_intensity.size() && time.size() == output_intensity.size(),
          "pulses must share a time grid");
  return {centroid_time(time, output_intensity) - centroid_time(time, input_intensity),
          parabolic_peak_time(time, output_intensity) - parabolic_peak_time(time, input_intensity)};
}

DelayEstimate extract_delay(const SampledPulse& input, const SampledPulse& output) {
  require(input.samples.size() == output.samples.size() && input.dt == output.dt &&
              input.t0 == output.t0,
          "pulses must share a time grid");
  const std::vector<double> t = grid_times(input);
  return extract_delay(t, input.intensity(), output.intensity());
}

double attenuation(const SampledPulse& input, const SampledPulse& output) {
  const double e_in = input.energy();
  if (!(e_in > 0.0)) throw DomainError("input pulse has zero energy");
  return output.energy() / e_in;
}

namespace {

constexpr std::size_t kBranchBlock = 8;

std::vector<double> block_intensity(const std::vector<cdouble>& spectrum, const SampledPulse& pulse,
                                    std::span<const MediumBranch> branches, std::size_t first,
                                    std::size_t last, const FftPlan& inverse) {
  std::vector<double> acc(spectrum.size(), 0.0);
  for (std::size_t b = first; b < last; ++b) {
    const std::vector<cdouble> field =
        synthesise(spectrum, sample_transfer(branches[b].transfer, pulse), inverse);
    for (std::size_t i = 0; i < field.size(); ++i) acc[i] += branches[b].weight * std::norm(field[i]);
  }
  return acc;
}

PropagationResult finish(const SampledPulse& pulse, std::span<const MediumBranch> branches,
                         const std::vector<cdouble>& spectrum, std::vector<double> intensity,
                         const FftPlan& inverse) {
  PropagationResult result;
  const std::vector<double> t = grid_times(pulse);
  const std::vector<double> in = pulse.intensity();
  const DelayEstimate d = extract_delay(t, in, intensity);
  result.delay_centroid = d.centroid;
  result.delay_peak = d.peak;

  double e_in = 0.0;
  double e_out = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    e_in += in[i];
    e_out += intensity[i];
  }
  result.energy_transmission = e_out / e_in;

  result.output = pulse;
  if (branches.size() == 1 && branches[0].weight == 1.0) {
    result.output.samples = synthesise(spectrum, sample_transfer(branches[0].transfer, pulse), inverse);
  } else {
    for (std::size_t i = 0; i < intensity.size(); ++i) {
      result.output.samples[i] = cdouble(std::sqrt(intensity[i]), 0.0);
    }
  }
  result.output_intensity = std::move(intensity);
  return result;
}

void check_branches(const SampledPulse& pulse, std::span<const MediumBranch> branches) {
  require(!branches.empty(), "medium has no branches");
  require(is_power_of_two(pulse.samples.size()), "sample count must be a power of two");
  require(pulse.energy() > 0.0, "input pulse has zero energy");
}

}  // namespace

PropagationResult propagate_incoherent_serial(const SampledPulse& pulse,
                                              std::span<const MediumBranch> branches) {
  check_branches(pulse, branches);
  const std::size_t n = pulse.samples.size();
  const FftPlan forward(n, FFTW_BACKWARD);
  const FftPlan inverse(n, FFTW_FORWARD);
  const std::vector<cdouble> spectrum = analyse(pulse, forward);

  const std::size_t blocks = (branches.size() + kBranchBlock - 1) / kBranchBlock;
  std::vector<double> total(n, 0.0);
  for (std::size_t k = 0; k < blocks; ++k) {
    const std::vector<double> part =
        block_intensity(spectrum, pulse, branches, k * kBranchBlock,
                        std::min(branches.size(), (k + 1) * kBranchBlock), inverse);
    for (std::size_t i = 0; i < n; ++i) total[i] += part[i];
  }
  return finish(pulse, branches, spectrum, std::move(total), inverse);
}

PropagationResult propagate_incoherent_parallel(const SampledPulse& pulse,
                                                std::span<const MediumBranch> branches) {
  check_branches(pulse, branches);
  const std::size_t n = pulse.samples.size();
  const FftPlan forward(n, FFTW_BACKWARD);
  const FftPlan inverse(n, FFTW_FORWARD);
  const std::vector<cdouble> spectrum = analyse(pulse, forward);

  const std::size_t blocks = (branches.size() + kBranchBlock - 1) / kBranchBlock;
  std::vector<std::vector<double>> parts(blocks);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(blocks); ++k) {
    const auto first = static_cast<std::size_t>(k) * kBranchBlock;
    parts[k] = block_intensity(spectrum, pulse, branches, first,
                               std::min(branches.size(), first + kBranchBlock), inverse);
  }
  std::vector<double> total(n, 0.0);
  for (const auto& part : parts) {
    for (std::size_t i = 0; i < n; ++i) total[i] += part[i];
  }
  return finish(pulse, branches, spectrum, std::move(total), inverse);
}

PropagationResult propagate_through(const SampledPulse& pulse, const SpectrumModel& model,
                                    double delta_cavity) {
  const std::vector<MediumBranch> branches = model.branches(delta_cavity);
  return propagate_incoherent_parallel(pulse, branches);
}

}  // namespace vit
