#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace radiomap::tools {

struct FigureOutputs {
  std::string csv;
  std::string svg;
  std::map<std::string, double> metrics;
};

/// Reproduces one of the 1D toy experiments (fig1..fig5). Deterministic
/// in the seed; unknown names throw std::invalid_argument.
FigureOutputs make_figure(const std::string& name, std::uint64_t seed);

/// Test MSE of the KRR estimate on the shared 1D scenario with the
/// given measurement count (the fig4/fig5 experiment core).
double figure_krr_mse(std::uint64_t seed, int measurement_count);

}  // namespace radiomap::tools
