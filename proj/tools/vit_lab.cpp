// vit_lab: spectra, pulses, synthetic scans, fits and figure recipes.
//
// Exit codes: 0 success, 2 config or validation error, 3 numerical
// non-convergence.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vit/error.hpp"
#include "vit/estimation.hpp"
#include "vit/io.hpp"
#include "vit/kernels.hpp"
#include "vit/pulse.hpp"
#include "vit/recipes.hpp"
#include "vit/synth.hpp"

namespace fs = std::filesystem;
using vit::io::json;
using vit::units::angular_to_mhz;
using vit::units::mhz_to_angular;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNonConvergence = 3;

struct Corrections {
  bool standing_wave = false;
  bool side_channel = false;
  bool jitter = false;

  void add_to(CLI::App* cmd) {
    cmd->add_flag("--standing-wave", standing_wave, "Average over the cavity standing wave");
    cmd->add_flag("--side-channel", side_channel, "Add the off-resonant side channel");
    cmd->add_flag("--jitter", jitter, "Gaussian cavity-frequency jitter");
  }

  // Flags only switch corrections on; the config may already enable them.
  void apply(vit::io::RunConfig& cfg) const {
    if (standing_wave) cfg.corrections.standing_wave = true;
    if (side_channel) cfg.corrections.side_channel = cfg.side_channel;
    if (jitter) cfg.corrections.jitter = cfg.jitter;
  }
};

struct ProbeScan {
  double from = -15.0;
  double to = 15.0;
  double step = 0.05;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--from", from, "First probe detuning (MHz)")->capture_default_str();
    cmd->add_option("--to", to, "Last probe detuning (MHz)")->capture_default_str();
    cmd->add_option("--step", step, "Probe step (MHz)")->capture_default_str();
  }

  std::vector<double> grid() const {
    if (!(step > 0.0)) throw vit::ConfigError("--step must be positive");
    if (to < from) throw vit::ConfigError("--to must not be below --from");
    return vit::recipes::uniform_grid(mhz_to_angular(from), mhz_to_angular(to), mhz_to_angular(step));
  }
};

vit::io::RunConfig load_config(const std::string& path) {
  if (!path.empty()) return vit::io::load_run_config(path);
  if (const auto env = vit::io::config_path_from_env()) return vit::io::load_run_config(*env);
  return vit::io::default_run_config();
}

bool have_explicit_config(const std::string& path) {
  return !path.empty() || vit::io::config_path_from_env().has_value();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw vit::ConfigError("cannot write " + path);
  out << text;
}

void write_json(const std::string& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw vit::ConfigError("cannot open " + path);
  return in;
}

json read_json_file(const std::string& path) {
  std::ifstream in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw vit::ConfigError(path + " is not valid JSON: " + e.what());
  }
}

std::string sidecar_path(const std::string& csv_path) {
  return fs::path(csv_path).replace_extension(".json").string();
}

// Fit outcomes other than convergence map to the non-convergence exit code.
int fit_exit_code(const vit::FitResult& fit) { return fit.converged ? 0 : kExitNonConvergence; }

// ---- spectrum ---------------------------------------------------------------

struct SpectrumArgs {
  double delta_cavity = 0.5;
  std::optional<double> eta;
  ProbeScan scan;
  Corrections corrections;
  std::string output;
};

int cmd_spectrum(vit::io::RunConfig cfg, const SpectrumArgs& a) {
  a.corrections.apply(cfg);
  if (a.eta) cfg.eta = *a.eta;
  const std::vector<double> grid = a.scan.grid();
  const vit::SpectrumModel model(cfg.physics, cfg.eta_vacuum(), cfg.corrections, cfg.emission_scale);
  const auto samples =
      vit::kernels::evaluate_spectrum_parallel(model, grid, mhz_to_angular(a.delta_cavity));
  std::ostringstream out;
  vit::io::write_spectrum_csv(out, grid, samples);
  write_text(a.output, out.str());
  return 0;
}

// ---- pulse ------------------------------------------------------------------

struct PulseArgs {
  double duration_us = 1.73;
  std::optional<double> eta;
  std::optional<double> od;
  double carrier = 0.0;
  double delta_cavity = 0.0;
  std::size_t samples = std::size_t{1} << 14;
  double span_us = 0.0;
  std::string width = "fwhm";
  Corrections corrections;
  std::string output;
  std::string trace;
};

int cmd_pulse(vit::io::RunConfig cfg, const PulseArgs& a) {
  a.corrections.apply(cfg);
  if (a.eta) cfg.eta = *a.eta;
  if (a.od) cfg.physics.od = *a.od;
  try {
    cfg.physics.validate();
  } catch (const vit::DomainError& e) {
    throw vit::ConfigError(e.what());
  }

  vit::PulseSpec spec;
  spec.duration = vit::units::us_to_s(a.duration_us);
  spec.carrier_detuning = mhz_to_angular(a.carrier);
  spec.width = a.width == "fwhm" ? vit::PulseWidth::IntensityFwhm
                                 : vit::PulseWidth::IntensityOneOverESquared;
  vit::GridConfig grid;
  grid.samples = a.samples;
  grid.span = vit::units::us_to_s(a.span_us);

  const vit::SampledPulse input = vit::make_gaussian_pulse(spec, grid);
  const double eta = cfg.eta_vacuum();
  const vit::SpectrumModel model(cfg.physics, eta, cfg.corrections);
  const vit::PropagationResult res = vit::propagate_through(input, model, mhz_to_angular(a.delta_cavity));

  const json doc = {
      {"delay_centroid_ns", vit::units::s_to_ns(res.delay_centroid)},
      {"delay_peak_ns", vit::units::s_to_ns(res.delay_peak)},
      {"energy_transmission", res.energy_transmission},
      {"analytic_delay_ns", vit::units::s_to_ns(vit::group_delay_analytic(cfg.physics.od, cfg.physics.kappa, eta))},
      {"exact_delay_ns",
       vit::units::s_to_ns(vit::group_delay_exact(cfg.physics.od, cfg.physics.kappa, cfg.physics.gamma, eta))},
      {"eta", eta},
      {"od", cfg.physics.od},
      {"duration_us", a.duration_us},
  };
  write_json(a.output, doc);

  if (!a.trace.empty()) {
    const std::vector<double> in_int = input.intensity();
    std::vector<std::vector<double>> rows;
    rows.reserve(in_int.size());
    for (std::size_t i = 0; i < in_int.size(); ++i) {
      rows.push_back({vit::units::s_to_us(input.time(i)), in_int[i], res.output_intensity[i]});
    }
    std::ofstream out(a.trace, std::ios::binary);
    if (!out) throw vit::ConfigError("cannot write " + a.trace);
    vit::io::write_csv(out, {"time_us", "input_intensity", "output_intensity"}, rows);
  }
  return 0;
}

// ---- synth ------------------------------------------------------------------

struct SynthArgs {
  std::vector<double> delta_cavity{0.5};
  ProbeScan scan{-8.0, 8.0, 0.1};
  std::optional<double> eta;
  std::optional<double> flux;
  double power_fw = 220.0;
  double dwell_us = 1e4;
  double eff_d1 = 0.3;
  double eff_d2 = 0.05;
  std::uint64_t seed = 1;
  Corrections corrections;
  std::string output;
  std::string sidecar;
};

int cmd_synth(vit::io::RunConfig cfg, const SynthArgs& a) {
  a.corrections.apply(cfg);
  if (a.eta) cfg.eta = *a.eta;
  vit::ScanPlan plan;
  for (double d : a.delta_cavity) plan.delta_cavity_list.push_back(mhz_to_angular(d));
  plan.probe_grid = a.scan.grid();
  plan.photon_flux =
      a.flux ? *a.flux : vit::recipes::photon_flux_from_power(a.power_fw * 1e-15, cfg.physics.lambda);
  plan.dwell = vit::units::us_to_s(a.dwell_us);
  plan.efficiency_d1 = a.eff_d1;
  plan.efficiency_d2 = a.eff_d2;
  plan.rng_seed = a.seed;
  try {
    plan.validate();
  } catch (const vit::DomainError& e) {
    throw vit::ConfigError(e.what());
  }

  const double eta = cfg.eta_vacuum();
  const vit::SpectrumModel model(cfg.physics, eta, cfg.corrections, cfg.emission_scale);
  const auto blocks = vit::generate_scan_parallel(model, plan);
  std::ostringstream out;
  vit::io::write_scan_csv(out, blocks);
  write_text(a.output, out.str());

  std::string side = a.sidecar;
  if (side.empty() && !a.output.empty() && a.output != "-") side = sidecar_path(a.output);
  if (!side.empty()) write_json(side, vit::io::scan_sidecar(cfg, plan, eta));
  return 0;
}

// ---- fit --------------------------------------------------------------------

struct FitVitArgs {
  std::vector<std::string> inputs;
  std::string sidecar;
  std::vector<std::string> free{"eta_eff", "od", "scale_d2"};
  std::optional<double> eta_start;
  std::optional<double> od_start;
  bool expected = false;
  bool no_d2 = false;
  Corrections corrections;
  std::string output;
};

int cmd_fit_vit(const std::string& config_path, const FitVitArgs& a) {
  std::vector<vit::VitDataset> datasets;
  std::optional<vit::io::RunConfig> sidecar_cfg;
  for (const std::string& path : a.inputs) {
    const std::string side = a.sidecar.empty() ? sidecar_path(path) : a.sidecar;
    const json doc = read_json_file(side);
    if (!doc.contains("plan")) throw vit::ConfigError(side + " has no scan plan");
    const vit::ScanPlan plan = vit::io::plan_from_json(doc.at("plan"));
    if (!sidecar_cfg && doc.contains("config")) sidecar_cfg = vit::io::run_config_from_json(doc.at("config"));

    std::ifstream in = open_input(path);
    const auto blocks = vit::io::read_scan_csv(in);
    for (auto& d : vit::recipes::datasets_from_scan(blocks, plan, a.expected)) {
      if (a.no_d2) d.d2.reset();
      datasets.push_back(std::move(d));
    }
  }
  if (datasets.empty()) throw vit::ConfigError("no datasets to fit");

  // An explicit config wins over the one recorded with the scan.
  vit::io::RunConfig cfg = have_explicit_config(config_path) || !sidecar_cfg
                               ? load_config(config_path)
                               : *sidecar_cfg;
  a.corrections.apply(cfg);

  vit::VitFitSetup setup;
  setup.cfg = cfg.physics;
  setup.model = cfg.corrections;
  setup.free = {false, false, false, false, false};
  for (const std::string& name : a.free) {
    if (name == "eta_eff") setup.free.eta_eff = true;
    else if (name == "od") setup.free.od = true;
    else if (name == "scale_d2") setup.free.scale_d2 = true;
    else if (name == "delta_offset") setup.free.delta_offset = true;
    else if (name == "probe_offset") setup.free.probe_offset = true;
    else throw vit::ConfigError("unknown fit parameter '" + name + "'");
  }
  if (a.eta_start) setup.eta_eff = *a.eta_start;
  if (a.od_start) setup.od = *a.od_start;

  const vit::FitResult fit = vit::fit_vit_spectra(datasets, setup);
  write_json(a.output, vit::io::fit_result_json(fit));
  return fit_exit_code(fit);
}

struct FitLorentzianArgs {
  std::string input;
  std::string column = "transmission";
  std::string sigma_column;
  std::string output;
};

int cmd_fit_lorentzian(const FitLorentzianArgs& a) {
  std::ifstream in = open_input(a.input);
  const vit::io::CsvTable table = vit::io::read_csv(in);
  vit::Spectrum s;
  for (double x : table.values("delta_probe_MHz")) s.detuning.push_back(mhz_to_angular(x));
  s.value = table.values(a.column);
  if (!a.sigma_column.empty()) s.sigma = table.values(a.sigma_column);
  const vit::FitResult fit = vit::fit_lorentzian(s);
  write_json(a.output, vit::io::fit_result_json(fit));
  return fit_exit_code(fit);
}

struct FitLinearArgs {
  std::string input;
  std::string x = "n_c";
  std::string y = "eta_eff";
  std::string sigma = "eta_eff_err";
  std::optional<double> threshold;
  std::string output;
};

int cmd_fit_linear(const FitLinearArgs& a) {
  std::ifstream in = open_input(a.input);
  const vit::io::CsvTable table = vit::io::read_csv(in);
  const auto x = table.values(a.x);
  const auto y = table.values(a.y);
  const auto s = table.values(a.sigma);
  const vit::LinearFit fit =
      a.threshold ? vit::fit_linear_above(x, y, s, *a.threshold) : vit::fit_linear_weighted(x, y, s);
  write_json(a.output, vit::io::linear_fit_json(fit));
  return 0;
}

// ---- reproduce --------------------------------------------------------------

struct ReproduceArgs {
  std::string figure;
  std::string out_dir = "reproduce";
  std::uint64_t seed = 1;
};

void save(const fs::path& path, const std::string& text, json& files) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw vit::ConfigError("cannot write " + path.string());
  out << text;
  files.push_back(path.filename().string());
}

int reproduce_fig2(const vit::io::RunConfig& cfg, const ReproduceArgs& a, const fs::path& dir) {
  const auto r = vit::recipes::run_fig2(cfg, a.seed);
  json files = json::array();
  json panels = json::array();
  for (const auto& p : r.panels) {
    std::ostringstream s;
    vit::io::write_spectrum_csv(s, r.probe_grid, p.spectrum);
    save(dir / ("spectrum_" + p.name + ".csv"), s.str(), files);
    panels.push_back({{"panel", p.name}, {"delta_cavity_MHz", angular_to_mhz(p.delta_cavity)}});
  }
  std::ostringstream scan;
  vit::io::write_scan_csv(scan, r.scan);
  save(dir / "scan.csv", scan.str(), files);
  save(dir / "scan.json", vit::io::scan_sidecar(cfg, r.plan, cfg.eta_vacuum()).dump(2) + "\n", files);
  save(dir / "joint_fit.json", vit::io::fit_result_json(r.joint_fit).dump(2) + "\n", files);
  save(dir / "linewidth_fit.json", vit::io::fit_result_json(r.linewidth_fit).dump(2) + "\n", files);

  const json manifest = {{"figure", "fig2"},
                         {"seed", a.seed},
                         {"eta_vacuum", cfg.eta_vacuum()},
                         {"panels", panels},
                         {"files", files},
                         {"config", vit::io::to_json(cfg)}};
  write_json((dir / "manifest.json").string(), manifest);
  return std::max(fit_exit_code(r.joint_fit), fit_exit_code(r.linewidth_fit));
}

int reproduce_fig3(const vit::io::RunConfig& cfg, const ReproduceArgs& a, const fs::path& dir) {
  const vit::recipes::Fig3Options opt;
  const auto r = vit::recipes::run_fig3(cfg, opt);
  json files = json::array();
  const std::vector<double> in_int = r.input.intensity();
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < in_int.size(); ++i) {
    rows.push_back({vit::units::s_to_us(r.input.time(i)), in_int[i], r.output.output_intensity[i]});
  }
  std::ostringstream trace;
  vit::io::write_csv(trace, {"time_us", "input_intensity", "output_intensity"}, rows);
  save(dir / "pulse_trace.csv", trace.str(), files);

  const json manifest = {{"figure", "fig3"},
                         {"seed", a.seed},
                         {"eta", r.eta},
                         {"od", opt.od},
                         {"duration_us", vit::units::s_to_us(opt.duration)},
                         {"delay_centroid_ns", vit::units::s_to_ns(r.output.delay_centroid)},
                         {"delay_peak_ns", vit::units::s_to_ns(r.output.delay_peak)},
                         {"analytic_delay_ns", vit::units::s_to_ns(r.analytic_delay)},
                         {"exact_delay_ns", vit::units::s_to_ns(r.exact_delay)},
                         {"energy_transmission", r.output.energy_transmission},
                         {"files", files},
                         {"config", vit::io::to_json(cfg)}};
  write_json((dir / "manifest.json").string(), manifest);
  return 0;
}

int reproduce_fig4(const vit::io::RunConfig& cfg, const ReproduceArgs& a, const fs::path& dir) {
  vit::recipes::Fig4Options opt;
  opt.seed = a.seed;
  opt.model = cfg.corrections;
  const auto r = vit::recipes::run_fig4(cfg, opt);
  json files = json::array();
  std::vector<std::vector<double>> rows;
  for (const auto& p : r.points) {
    rows.push_back({p.n_c, p.eta_true, p.fit.value("eta_eff"), p.fit.error("eta_eff"),
                    p.transparency.theta, p.transparency.error});
  }
  std::ostringstream pts;
  vit::io::write_csv(pts, {"n_c", "eta_true", "eta_eff", "eta_eff_err", "theta", "theta_err"}, rows);
  save(dir / "cooperativity.csv", pts.str(), files);
  save(dir / "linear_fit.json", vit::io::linear_fit_json(r.line).dump(2) + "\n", files);

  const json manifest = {{"figure", "fig4"},
                         {"seed", a.seed},
                         {"eta_eff_0", opt.eta_eff_0},
                         {"threshold", opt.threshold},
                         {"slope", r.line.slope},
                         {"intercept", r.line.intercept},
                         {"ratio", r.ratio.value},
                         {"ratio_error", r.ratio.error},
                         {"files", files},
                         {"config", vit::io::to_json(cfg)}};
  write_json((dir / "manifest.json").string(), manifest);
  return 0;
}

int cmd_reproduce(const vit::io::RunConfig& cfg, const ReproduceArgs& a) {
  const fs::path dir = fs::path(a.out_dir) / a.figure;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw vit::ConfigError("cannot create " + dir.string() + ": " + ec.message());
  if (a.figure == "fig2") return reproduce_fig2(cfg, a, dir);
  if (a.figure == "fig3") return reproduce_fig3(cfg, a, dir);
  return reproduce_fig4(cfg, a, dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vacuum-induced transparency simulator"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "Run configuration JSON (else $VIT_LAB_CONFIG, else defaults)");

  SpectrumArgs spectrum;
  auto* sp = app.add_subcommand("spectrum", "Transmission and cavity-emission spectrum");
  sp->add_option("--delta-cavity", spectrum.delta_cavity, "Cavity detuning (MHz)")->capture_default_str();
  sp->add_option("--eta", spectrum.eta, "Antinode cooperativity (overrides config)");
  spectrum.scan.add_to(sp);
  spectrum.corrections.add_to(sp);
  sp->add_option("-o,--output", spectrum.output, "CSV path (default stdout)");

  PulseArgs pulse;
  auto* pu = app.add_subcommand("pulse", "Gaussian pulse delay through the medium");
  pu->add_option("--duration", pulse.duration_us, "Pulse intensity width (us)")->capture_default_str();
  pu->add_option("--width", pulse.width, "Width convention")
      ->check(CLI::IsMember({"fwhm", "1/e2"}))
      ->capture_default_str();
  pu->add_option("--eta", pulse.eta, "Antinode cooperativity (overrides config)");
  pu->add_option("--od", pulse.od, "Optical depth (overrides config)");
  pu->add_option("--carrier", pulse.carrier, "Carrier probe detuning (MHz)");
  pu->add_option("--delta-cavity", pulse.delta_cavity, "Cavity detuning (MHz)");
  pu->add_option("--samples", pulse.samples, "Grid samples (power of two)")->capture_default_str();
  pu->add_option("--span", pulse.span_us, "Grid span (us); 0 selects 16 x duration");
  pulse.corrections.add_to(pu);
  pu->add_option("-o,--output", pulse.output, "JSON path (default stdout)");
  pu->add_option("--trace", pulse.trace, "Optional intensity trace CSV");

  SynthArgs synth;
  auto* sy = app.add_subcommand("synth", "Synthetic photon-counting scan");
  sy->add_option("--delta-cavity", synth.delta_cavity, "Cavity detunings (MHz)")->delimiter(',');
  synth.scan.add_to(sy);
  sy->add_option("--eta", synth.eta, "Antinode cooperativity (overrides config)");
  sy->add_option("--flux", synth.flux, "Probe photon flux (1/s); overrides --power");
  sy->add_option("--power", synth.power_fw, "Probe power (fW)")->capture_default_str();
  sy->add_option("--dwell", synth.dwell_us, "Dwell per point (us)")->capture_default_str();
  sy->add_option("--eff-d1", synth.eff_d1, "D1 detection efficiency")->capture_default_str();
  sy->add_option("--eff-d2", synth.eff_d2, "D2 detection efficiency")->capture_default_str();
  sy->add_option("--seed", synth.seed, "Noise seed")->capture_default_str();
  synth.corrections.add_to(sy);
  sy->add_option("-o,--output", synth.output, "CSV path (default stdout)");
  sy->add_option("--sidecar", synth.sidecar, "JSON sidecar path (default: output with .json)");

  auto* fit = app.add_subcommand("fit", "Fit spectra or a line");
  fit->require_subcommand(1);

  FitVitArgs fit_vit;
  auto* fv = fit->add_subcommand("vit", "Joint D1/D2 fit of scan CSVs");
  fv->add_option("-i,--input", fit_vit.inputs, "Scan CSV(s) written by synth")->required();
  fv->add_option("--sidecar", fit_vit.sidecar, "Scan sidecar JSON (default: input with .json)");
  fv->add_option("--free", fit_vit.free, "Free parameters")
      ->delimiter(',')
      ->check(CLI::IsMember({"eta_eff", "od", "scale_d2", "delta_offset", "probe_offset"}));
  fv->add_option("--eta-start", fit_vit.eta_start, "Start (or fixed) eta_eff");
  fv->add_option("--od-start", fit_vit.od_start, "Start (or fixed) OD");
  fv->add_flag("--expected", fit_vit.expected, "Fit the noiseless expectations");
  fv->add_flag("--no-d2", fit_vit.no_d2, "Ignore cavity-emission counts");
  fit_vit.corrections.add_to(fv);
  fv->add_option("-o,--output", fit_vit.output, "JSON path (default stdout)");

  FitLorentzianArgs fit_lor;
  auto* fl = fit->add_subcommand("lorentzian", "Absorption line fit of a spectrum CSV");
  fl->add_option("-i,--input", fit_lor.input, "CSV with delta_probe_MHz")->required();
  fl->add_option("--column", fit_lor.column, "Value column")->capture_default_str();
  fl->add_option("--sigma-column", fit_lor.sigma_column, "Uncertainty column");
  fl->add_option("-o,--output", fit_lor.output, "JSON path (default stdout)");

  FitLinearArgs fit_lin;
  auto* fn = fit->add_subcommand("linear", "Weighted straight-line fit");
  fn->add_option("-i,--input", fit_lin.input, "CSV input")->required();
  fn->add_option("--x", fit_lin.x, "x column")->capture_default_str();
  fn->add_option("--y", fit_lin.y, "y column")->capture_default_str();
  fn->add_option("--sigma", fit_lin.sigma, "y uncertainty column")->capture_default_str();
  fn->add_option("--above", fit_lin.threshold, "Use only points with x above this value");
  fn->add_option("-o,--output", fit_lin.output, "JSON path (default stdout)");

  ReproduceArgs repro;
  auto* rp = app.add_subcommand("reproduce", "Run a figure recipe into a directory");
  rp->add_option("figure", repro.figure, "Figure id")->required()->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
  rp->add_option("--out", repro.out_dir, "Output root directory")->capture_default_str();
  rp->add_option("--seed", repro.seed, "Noise seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*fit) {
      if (*fv) return cmd_fit_vit(config_path, fit_vit);
      if (*fl) return cmd_fit_lorentzian(fit_lor);
      return cmd_fit_linear(fit_lin);
    }
    const vit::io::RunConfig cfg = load_config(config_path);
    if (*sp) return cmd_spectrum(cfg, spectrum);
    if (*pu) return cmd_pulse(cfg, pulse);
    if (*sy) return cmd_synth(cfg, synth);
    return cmd_reproduce(cfg, repro);
  } catch (const vit::ConvergenceError& e) {
    std::cerr << "vit_lab: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const vit::ConfigError& e) {
    std::cerr << "vit_lab: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "vit_lab: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "vit_lab: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "vit_lab: " << e.what() << '\n';
    return 1;
  }
}
