#include "vit/kernels.hpp"

#include <cstddef>

namespace vit::kernels {

std::vector<SpectrumSample> evaluate_spectrum_serial(const SpectrumModel& model,
                                                     std::span<const double> probe_grid,
                                                     double delta_cavity) {
  std::vector<SpectrumSample> out(probe_grid.size());
  for (std::size_t i = 0; i < probe_grid.size(); ++i) {
    out[i] = model.at({probe_grid[i], delta_cavity});
  }
  return out;
}

std::vector<SpectrumSample> evaluate_spectrum_parallel(const SpectrumModel& model,
                                                       std::span<const double> probe_grid,
                                                       double delta_cavity) {
  const auto n = static_cast<std::ptrdiff_t>(probe_grid.size());
  std::vector<SpectrumSample> out(probe_grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = model.at({probe_grid[i], delta_cavity});
  }
  return out;
}

std::vector<double> transmission_serial(const SpectrumModel& model,
                                        std::span<const double> probe_grid, double delta_cavity) {
  std::vector<double> out(probe_grid.size());
  for (std::size_t i = 0; i < probe_grid.size(); ++i) {
    out[i] = model.at({probe_grid[i], delta_cavity}).transmission;
  }
  return out;
}

std::vector<double> transmission_parallel(const SpectrumModel& model,
                                          std::span<const double> probe_grid,
                                          double delta_cavity) {
  const auto n = static_cast<std::ptrdiff_t>(probe_grid.size());
  std::vector<double> out(probe_grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = model.at({probe_grid[i], delta_cavity}).transmission;
  }
  return out;
}

}  // namespace vit::kernels
