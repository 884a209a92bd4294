#pragma once

#include "torlevy/report.hpp"
#include "torlevy/solver.hpp"

namespace torlevy {

// Strict JSON config parsing: physics parameters are always explicit,
// numerical knobs default; unknown keys are rejected.
void reject_unknown_keys(const Json& obj, const std::vector<std::string>& allowed,
                         const std::string& where);

TorusGrid parse_grid(const Json& j);
BoundedLevyMeasure parse_measure(const Json& j, int dim);
KernelCoefficient parse_kernel(const Json& j);
DriftField parse_drift(const Json& j, int dim);
QuadratureScheme parse_quadrature(const Json& j);
SamplerConfig parse_sampler(const Json& j, int dim);
GridFunction parse_field(const Json& j, const TorusGrid& grid);
std::function<GridFunction(double)> parse_forcing(const Json& j, const TorusGrid& grid);

// assembles the Cauchy problem from the root config (grid, measure, kernel,
// drift, problem, quadrature sections); runs hypothesis validation
Problem parse_problem(const Json& root);

}  // namespace torlevy
