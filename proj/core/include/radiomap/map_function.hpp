#pragma once

#include <functional>

#include "radiomap/geometry.hpp"
#include "radiomap/measurement.hpp"

namespace radiomap {

/// The common currency between estimators: an immutable fitted map,
/// deterministic and side-effect free.
using MapFunction = std::function<double(const Location&)>;

/// An estimator configuration: fits scalar measurements and returns the
/// evaluation function. Lets composite estimators (per-frequency, BEM)
/// stay agnostic of the inner method.
using FitFunction = std::function<MapFunction(const MeasurementSet&)>;

}  // namespace radiomap
