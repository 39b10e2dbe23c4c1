#pragma once

#include <span>
#include <vector>

#include "vit/spatial.hpp"

// Grid kernels. Each *_parallel routine is an OpenMP version of the
// matching *_serial reference; every output element is computed
// independently, so the two agree bit for bit.
namespace vit::kernels {

std::vector<SpectrumSample> evaluate_spectrum_serial(const SpectrumModel& model,
                                                     std::span<const double> probe_grid,
                                                     double delta_cavity);

std::vector<SpectrumSample> evaluate_spectrum_parallel(const SpectrumModel& model,
                                                       std::span<const double> probe_grid,
                                                       double delta_cavity);

/// Transmission only, one value per probe detuning.
std::vector<double> transmission_serial(const SpectrumModel& model,
                                        std::span<const double> probe_grid, double delta_cavity);
std::vector<double> transmission_parallel(const SpectrumModel& model,
                                          std::span<const double> probe_grid,
                                          double delta_cavity);

}  // namespace vit::kernels
