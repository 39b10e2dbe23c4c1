#include "vit/io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "vit/error.hpp"

namespace vit::io {

using units::angular_to_mhz;
using units::mhz_to_angular;

double RunConfig::eta_vacuum() const {
  if (eta) return *eta;
  return physics.f_cavity * cooperativity_geometric(geometry);
}

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.corrections.standing_wave = false;
  cfg.corrections.standing_wave_nodes = 64;
  return cfg;
}

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

double number(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  return v.get<double>();
}

bool boolean(const json& obj, const std::string& key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError("'" + key + "' must be true or false");
  return v.get<bool>();
}

int integer(const json& obj, const std::string& key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  return v.get<int>();
}

}  // namespace

RunConfig run_config_from_json(const json& doc) {
  reject_unknown(doc,
                 {"gamma_MHz", "kappa_MHz", "lambda_um", "finesse", "waist_um", "od",
                  "ensemble_length_um", "f_probe", "f_cavity", "eta", "emission_scale",
                  "standing_wave", "side_channel", "jitter"},
                 "config");
  RunConfig cfg = default_run_config();
  PhysicalConfig& p = cfg.physics;
  p.gamma = mhz_to_angular(number(doc, "gamma_MHz", angular_to_mhz(p.gamma)));
  p.kappa = mhz_to_angular(number(doc, "kappa_MHz", angular_to_mhz(p.kappa)));
  p.lambda = units::um_to_m(number(doc, "lambda_um", units::m_to_um(p.lambda)));
  p.od = number(doc, "od", p.od);
  p.ensemble_length =
      units::um_to_m(number(doc, "ensemble_length_um", units::m_to_um(p.ensemble_length)));
  p.f_probe = number(doc, "f_probe", p.f_probe);
  p.f_cavity = number(doc, "f_cavity", p.f_cavity);
  cfg.geometry.finesse = number(doc, "finesse", cfg.geometry.finesse);
  cfg.geometry.waist = units::um_to_m(number(doc, "waist_um", units::m_to_um(cfg.geometry.waist)));
  cfg.geometry.lambda = p.lambda;
  if (doc.contains("eta") && !doc.at("eta").is_null()) cfg.eta = number(doc, "eta", 0.0);
  cfg.emission_scale = number(doc, "emission_scale", cfg.emission_scale);

  if (doc.contains("standing_wave")) {
    const json& sw = doc.at("standing_wave");
    reject_unknown(sw, {"enabled", "nodes"}, "standing_wave");
    cfg.corrections.standing_wave = boolean(sw, "enabled", false);
    cfg.corrections.standing_wave_nodes = integer(sw, "nodes", cfg.corrections.standing_wave_nodes);
  }
  if (doc.contains("side_channel")) {
    const json& sc = doc.at("side_channel");
    reject_unknown(sc, {"enabled", "weight", "zeeman_shift_MHz"}, "side_channel");
    cfg.side_channel.weight = number(sc, "weight", cfg.side_channel.weight);
    cfg.side_channel.zeeman_shift = mhz_to_angular(
        number(sc, "zeeman_shift_MHz", angular_to_mhz(cfg.side_channel.zeeman_shift)));
    if (boolean(sc, "enabled", false)) cfg.corrections.side_channel = cfg.side_channel;
  }
  if (doc.contains("jitter")) {
    const json& j = doc.at("jitter");
    reject_unknown(j, {"enabled", "fwhm_MHz", "nodes"}, "jitter");
    cfg.jitter.fwhm = mhz_to_angular(number(j, "fwhm_MHz", angular_to_mhz(cfg.jitter.fwhm)));
    cfg.jitter.nodes = integer(j, "nodes", cfg.jitter.nodes);
    if (boolean(j, "enabled", false)) cfg.corrections.jitter = cfg.jitter;
  }

  try {
    p.validate();
    cfg.geometry.validate();
    cfg.side_channel.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  if (cfg.eta && *cfg.eta < 0.0) throw ConfigError("invalid config: eta must be nonnegative");
  if (cfg.emission_scale <= 0.0) throw ConfigError("invalid config: emission_scale must be positive");
  if (cfg.jitter.fwhm < 0.0 || cfg.jitter.nodes < 2) {
    throw ConfigError("invalid config: jitter needs fwhm >= 0 and at least 2 nodes");
  }
  if (cfg.corrections.standing_wave_nodes < 1) {
    throw ConfigError("invalid config: standing_wave.nodes must be positive");
  }
  return cfg;
}

json to_json(const RunConfig& cfg) {
  const PhysicalConfig& p = cfg.physics;
  json doc = {
      {"gamma_MHz", angular_to_mhz(p.gamma)},
      {"kappa_MHz", angular_to_mhz(p.kappa)},
      {"lambda_um", units::m_to_um(p.lambda)},
      {"finesse", cfg.geometry.finesse},
      {"waist_um", units::m_to_um(cfg.geometry.waist)},
      {"od", p.od},
      {"ensemble_length_um", units::m_to_um(p.ensemble_length)},
      {"f_probe", p.f_probe},
      {"f_cavity", p.f_cavity},
      {"emission_scale", cfg.emission_scale},
      {"standing_wave",
       {{"enabled", cfg.corrections.standing_wave}, {"nodes", cfg.corrections.standing_wave_nodes}}},
      {"side_channel",
       {{"enabled", cfg.corrections.side_channel.has_value()},
        {"weight", cfg.side_channel.weight},
        {"zeeman_shift_MHz", angular_to_mhz(cfg.side_channel.zeeman_shift)}}},
      {"jitter",
       {{"enabled", cfg.corrections.jitter.has_value()},
        {"fwhm_MHz", angular_to_mhz(cfg.jitter.fwhm)},
        {"nodes", cfg.jitter.nodes}}},
  };
  doc["eta"] = cfg.eta ? json(*cfg.eta) : json(nullptr);
  return doc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(doc);
}

std::optional<std::string> config_path_from_env() {
  const char* env = std::getenv("VIT_LAB_CONFIG");
  if (env == nullptr || *env == '\0') return std::nullopt;
  return std::string(env);
}

// ---- CSV --------------------------------------------------------------------

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ConfigError("CSV has no column '" + name + "'");
}

std::vector<double> CsvTable::values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[c]);
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t start = 0;
    while (start < cell.size() && cell[start] == ' ') ++start;
    cells.push_back(cell.substr(start));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError("malformed number '" + text + "' in CSV");
  return v;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("CSV is empty; header row required");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  table.header = split(line);
  for (const std::string& h : table.header) {
    if (h.empty()) throw ConfigError("CSV header has an empty column name");
    bool numeric = true;
    try {
      parse_number(h);
    } catch (const ConfigError&) {
      numeric = false;
    }
    if (numeric) throw ConfigError("CSV header row missing (first row is numeric)");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != table.header.size()) {
      throw ConfigError("CSV line " + std::to_string(line_no) + " has " +
                        std::to_string(cells.size()) + " fields, expected " +
                        std::to_string(table.header.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& c : cells) row.push_back(parse_number(c));
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

void write_scan_csv(std::ostream& out, const std::vector<ScanBlock>& blocks) {
  std::vector<std::vector<double>> rows;
  for (const ScanBlock& b : blocks) {
    for (const CountRecord& r : b.records) {
      rows.push_back({angular_to_mhz(r.delta_probe), angular_to_mhz(r.delta_cavity),
                      static_cast<double>(r.counts_d1), static_cast<double>(r.counts_d2),
                      r.expected_d1, r.expected_d2});
    }
  }
  write_csv(out,
            {"delta_probe_MHz", "delta_cavity_MHz", "counts_d1", "counts_d2", "expected_d1",
             "expected_d2"},
            rows);
}

std::vector<ScanBlock> read_scan_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  const std::size_t cp = table.column("delta_probe_MHz");
  const std::size_t cc = table.column("delta_cavity_MHz");
  const std::size_t c1 = table.column("counts_d1");
  const std::size_t c2 = table.column("counts_d2");
  const std::size_t e1 = table.column("expected_d1");
  const std::size_t e2 = table.column("expected_d2");

  std::vector<ScanBlock> blocks;
  double last_mhz = 0.0;
  for (const auto& row : table.rows) {
    if (row[c1] < 0.0 || row[c2] < 0.0) throw ConfigError("negative counts in scan CSV");
    const double cavity = mhz_to_angular(row[cc]);
    if (blocks.empty() || row[cc] != last_mhz) {
      blocks.push_back({cavity, {}});
      last_mhz = row[cc];
    }
    CountRecord r;
    r.delta_probe = mhz_to_angular(row[cp]);
    r.delta_cavity = cavity;
    r.counts_d1 = static_cast<std::uint64_t>(row[c1]);
    r.counts_d2 = static_cast<std::uint64_t>(row[c2]);
    r.expected_d1 = row[e1];
    r.expected_d2 = row[e2];
    blocks.back().records.push_back(r);
  }
  return blocks;
}

void write_spectrum_csv(std::ostream& out, const std::vector<double>& probe_grid,
                        const std::vector<SpectrumSample>& samples) {
  std::vector<std::vector<double>> rows;
  rows.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    rows.push_back({angular_to_mhz(probe_grid[i]), samples[i].transmission, samples[i].cavity_emission});
  }
  write_csv(out, {"delta_probe_MHz", "transmission", "cavity_emission"}, rows);
}

void write_pulse_csv(std::ostream& out, const SampledPulse& pulse) {
  std::vector<std::vector<double>> rows;
  rows.reserve(pulse.samples.size());
  for (std::size_t i = 0; i < pulse.samples.size(); ++i) {
    rows.push_back({units::s_to_us(pulse.time(i)), pulse.samples[i].real(), pulse.samples[i].imag()});
  }
  write_csv(out, {"time_us", "re", "im"}, rows);
}

SampledPulse read_pulse_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  const std::vector<double> t = table.values("time_us");
  const std::vector<double> re = table.values("re");
  const std::vector<double> im = table.values("im");
  if (t.size() < 2) throw ConfigError("pulse trace needs at least two samples");
  SampledPulse p;
  p.t0 = units::us_to_s(t.front());
  p.dt = units::us_to_s(t[1] - t[0]);
  if (!(p.dt > 0.0)) throw ConfigError("pulse trace times must increase");
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double step = units::us_to_s(t[i] - t[i - 1]);
    if (std::abs(step - p.dt) > 1e-6 * p.dt) throw ConfigError("pulse trace is not uniformly sampled");
  }
  p.samples.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) p.samples[i] = cdouble(re[i], im[i]);
  return p;
}

// ---- JSON -------------------------------------------------------------------

json plan_to_json(const ScanPlan& plan) {
  json cav = json::array();
  for (double d : plan.delta_cavity_list) cav.push_back(angular_to_mhz(d));
  json probe = json::array();
  for (double d : plan.probe_grid) probe.push_back(angular_to_mhz(d));
  return {{"delta_cavity_MHz", cav},
          {"probe_grid_MHz", probe},
          {"photon_flux_per_s", plan.photon_flux},
          {"dwell_us", units::s_to_us(plan.dwell)},
          {"efficiency_d1", plan.efficiency_d1},
          {"efficiency_d2", plan.efficiency_d2},
          {"rng_seed", plan.rng_seed}};
}

ScanPlan plan_from_json(const json& doc) {
  reject_unknown(doc,
                 {"delta_cavity_MHz", "probe_grid_MHz", "photon_flux_per_s", "dwell_us",
                  "efficiency_d1", "efficiency_d2", "rng_seed"},
                 "plan");
  ScanPlan plan;
  try {
    for (double d : doc.at("delta_cavity_MHz")) plan.delta_cavity_list.push_back(mhz_to_angular(d));
    for (double d : doc.at("probe_grid_MHz")) plan.probe_grid.push_back(mhz_to_angular(d));
    plan.photon_flux = doc.at("photon_flux_per_s").get<double>();
    plan.dwell = units::us_to_s(doc.at("dwell_us").get<double>());
    plan.efficiency_d1 = doc.at("efficiency_d1").get<double>();
    plan.efficiency_d2 = doc.at("efficiency_d2").get<double>();
    plan.rng_seed = doc.at("rng_seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scan plan: ") + e.what());
  }
  try {
    plan.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid scan plan: ") + e.what());
  }
  return plan;
}

json scan_sidecar(const RunConfig& cfg, const ScanPlan& plan, double eta_true) {
  return {{"plan", plan_to_json(plan)}, {"config", to_json(cfg)}, {"eta_true", eta_true}};
}

namespace {

bool is_frequency_parameter(const std::string& name) {
  return name == "center" || name == "fwhm" || name == "delta_offset" || name == "probe_offset";
}

}  // namespace

json fit_result_json(const FitResult& fit) {
  json params = json::object();
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    const std::string& name = fit.names[i];
    const double scale = is_frequency_parameter(name) ? angular_to_mhz(1.0) : 1.0;
    const double err = fit.error(name);
    const std::string key = is_frequency_parameter(name) ? name + "_MHz" : name;
    params[key] = {{"value", fit.params(static_cast<Eigen::Index>(i)) * scale},
                   {"error", std::isfinite(err) ? json(err * scale) : json(nullptr)}};
  }
  json doc = {{"params", params},
              {"residual_norm", fit.residual_norm},
              {"converged", fit.converged},
              {"iterations", fit.iterations},
              {"status", to_string(fit.status)}};
  if (!fit.offending_parameter.empty()) doc["offending_parameter"] = fit.offending_parameter;
  return doc;
}

json linear_fit_json(const LinearFit& fit) {
  const Ratio r = ratio_with_error(fit.intercept, fit.intercept_err, fit.slope, fit.slope_err,
                                   fit.covariance);
  return {{"slope", {{"value", fit.slope}, {"error", fit.slope_err}}},
          {"intercept", {{"value", fit.intercept}, {"error", fit.intercept_err}}},
          {"ratio_intercept_over_slope", {{"value", r.value}, {"error", r.error}}},
          {"covariance", fit.covariance},
          {"chi2", fit.chi2},
          {"points", fit.points}};
}

}  // namespace vit::io
