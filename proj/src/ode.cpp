#include "qsl/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qsl/errors.hpp"

namespace qsl {

namespace {

// Dormand-Prince 5(4) tableau. b5 is the 7th row of a (FSAL); e = b5 - b4
// gives the error weights directly.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                 e4 = b4 - 393.0 / 640, e5 = b5 + 92097.0 / 339200,
                 e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

struct Stepper {
  const OdeField& f;
  const OdeOptions& opts;
  double t;
  Vec y;
  Vec k1;  // FSAL stage
  double h;
  double h_floor;
  long steps = 0;

  Stepper(const OdeField& f_, double t0, const Vec& y0, double span,
          const OdeOptions& o)
      : f(f_), opts(o), t(t0), y(y0), k1(f_(t0, y0)) {
    const double mag = std::abs(span);
    h = (o.h_init > 0 ? o.h_init : mag / 100.0) * (span < 0 ? -1.0 : 1.0);
    h_floor = o.h_min * std::max(mag, 1.0);
  }

  // One accepted step of size at most |h_cap| (sign taken from h_cap).
  void step_toward(double t_target) {
    const double remaining = t_target - t;
    double h_try = (remaining < 0) ? -std::abs(h) : std::abs(h);
    if (std::abs(h_try) > std::abs(remaining)) h_try = remaining;

    while (true) {
      if (++steps > opts.max_steps)
        throw OdeStepFailure("step budget exhausted before reaching the target time");
      const Vec k2 = f(t + c2 * h_try, y + h_try * (a21 * k1));
      const Vec k3 = f(t + c3 * h_try, y + h_try * (a31 * k1 + a32 * k2));
      const Vec k4 = f(t + c4 * h_try, y + h_try * (a41 * k1 + a42 * k2 + a43 * k3));
      const Vec k5 =
          f(t + c5 * h_try, y + h_try * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Vec k6 = f(t + h_try,
                       y + h_try * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Vec ynew =
          y + h_try * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Vec k7 = f(t + h_try, ynew);
      const Vec err =
          h_try * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      // RMS of the componentwise scaled error.
      double acc = 0.0;
      for (int i = 0; i < y.size(); ++i) {
        const double sc =
            opts.abs_tol +
            opts.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        const double q = err[i] / sc;
        acc += q * q;
      }
      double enorm = std::sqrt(acc / static_cast<double>(y.size()));
      if (!std::isfinite(enorm)) enorm = 1e10;

      if (enorm <= 1.0) {
        t += h_try;
        y = ynew;
        k1 = k7;
        const double grow =
            (enorm == 0.0) ? 5.0
                           : std::clamp(0.9 * std::pow(enorm, -0.2), 0.2, 5.0);
        h = h_try * grow;
        return;
      }
      const double shrink = std::clamp(0.9 * std::pow(enorm, -0.2), 0.1, 0.9);
      h_try *= shrink;
      if (std::abs(h_try) < h_floor) {
        std::ostringstream os;
        os << "step size underflow at t = " << t << " (h = " << h_try << ")";
        throw OdeStepFailure(os.str());
      }
    }
  }

  void run_to(double t_target) {
    const double dir = (t_target >= t) ? 1.0 : -1.0;
    while (dir * (t_target - t) > 1e-14 * std::max(1.0, std::abs(t_target)))
      step_toward(t_target);
    t = t_target;
  }
};

}  // namespace

Vec integrate_ode(const OdeField& f, double t0, const Vec& y0, double t1,
                  const OdeOptions& opts) {
  if (t1 == t0) return y0;
  Stepper s(f, t0, y0, t1 - t0, opts);
  s.run_to(t1);
  return s.y;
}

void integrate_path(const OdeField& f, double t0, const Vec& y0,
                    const std::vector<double>& ts,
                    const std::function<void(int, const Vec&)>& visit,
                    const OdeOptions& opts) {
  if (ts.empty()) return;
  const double last = ts.back();
  if (last == t0) {
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (ts[i] != t0) throw InputError("checkpoint list is not monotone from t0");
      visit(static_cast<int>(i), y0);
    }
    return;
  }
  const double dir = (last > t0) ? 1.0 : -1.0;
  Stepper s(f, t0, y0, last - t0, opts);
  double prev = t0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (dir * (ts[i] - prev) < 0)
      throw InputError("checkpoint list is not monotone from t0");
    s.run_to(ts[i]);
    visit(static_cast<int>(i), s.y);
    prev = ts[i];
  }
}

}  // namespace qsl
