#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vit/estimation.hpp"
#include "vit/physics.hpp"
#include "vit/pulse.hpp"
#include "vit/spatial.hpp"
#include "vit/synth.hpp"

// File formats and the run configuration. Everything crossing this
// boundary is in MHz (ordinary frequency), um, us and ns.
namespace vit::io {

using json = nlohmann::json;

struct RunConfig {
  PhysicalConfig physics;
  CavityGeometry geometry;
  /// Antinode vacuum cooperativity; unset means f_cavity x geometric eta_0.
  std::optional<double> eta;
  ModelOptions corrections;  // which corrections are on, with their parameters
  SideChannel side_channel;  // parameters used when the side channel is enabled
  CavityJitter jitter;       // parameters used when jitter is enabled
  double emission_scale = 1.0;

  double eta_vacuum() const;
};

/// Defaults: Gamma/2pi 5.2 MHz, kappa/2pi 0.173 MHz, lambda 0.852 um,
/// F 6.3e4, w 35 um, OD 0.4, L 20 um, f_ef 0.42, f_eg 0.47, corrections off.
RunConfig default_run_config();

/// Overlays `doc` on the defaults. Unknown keys and invalid values throw ConfigError.
RunConfig run_config_from_json(const json& doc);
json to_json(const RunConfig& cfg);
RunConfig load_run_config(const std::string& path);

/// Path in VIT_LAB_CONFIG, if set and non-empty.
std::optional<std::string> config_path_from_env();

// ---- CSV --------------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

/// Comma separated, '.' decimal, mandatory header row.
CsvTable read_csv(std::istream& in);
void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
/// Shortest round-trip representation of a double.
std::string format_number(double value);

/// delta_probe_MHz, delta_cavity_MHz, counts_d1, counts_d2, expected_d1, expected_d2
void write_scan_csv(std::ostream& out, const std::vector<ScanBlock>& blocks);
std::vector<ScanBlock> read_scan_csv(std::istream& in);

/// delta_probe_MHz, transmission, cavity_emission
void write_spectrum_csv(std::ostream& out, const std::vector<double>& probe_grid,
                        const std::vector<SpectrumSample>& samples);

/// time_us, re, im
void write_pulse_csv(std::ostream& out, const SampledPulse& pulse);
SampledPulse read_pulse_csv(std::istream& in);

// ---- JSON -------------------------------------------------------------------

json plan_to_json(const ScanPlan& plan);
ScanPlan plan_from_json(const json& doc);

/// Sidecar written next to a synthetic scan: plan, config, truth.
json scan_sidecar(const RunConfig& cfg, const ScanPlan& plan, double eta_true);

/// {params: {name: {value, error}}, residual_norm, converged, iterations, status}.
/// Offsets and linewidths are reported in MHz.
json fit_result_json(const FitResult& fit);
json linear_fit_json(const LinearFit& fit);

}  // namespace vit::io
