#pragma once

// Adaptive Dormand-Prince 5(4) for the small dense systems that show up
// here (Hamiltonian flows with their variational equations, dimension at
// most a few dozen). Step control is the classical err^{-1/5} rule with a
// 0.9 safety factor; the embedded 4th-order solution provides the error
// estimate and the first-same-as-last stage is reused across steps.

#include <functional>
#include <vector>

#include "qsl/quadratic.hpp"

namespace qsl {

using OdeField = std::function<Vec(double, const Vec&)>;

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double h_init = 0.0;    // 0: start from span/100
  double h_min = 1e-14;   // relative to the span; underflow -> OdeStepFailure
  long max_steps = 2000000;
};

// Integrates y' = f(t, y) from (t0, y0) to t1 (either direction) and returns
// y(t1). OdeStepFailure on step-size underflow or step-budget exhaustion.
Vec integrate_ode(const OdeField& f, double t0, const Vec& y0, double t1,
                  const OdeOptions& opts = {});

// Same integration, sampling the solution at the sorted checkpoints ts
// (monotone from t0) by landing a step on each one; visit(i, y) is called in
// order. Used to read a flow off at quadrature nodes in one sweep.
void integrate_path(const OdeField& f, double t0, const Vec& y0,
                    const std::vector<double>& ts,
                    const std::function<void(int, const Vec&)>& visit,
                    const OdeOptions& opts = {});

}  // namespace qsl
