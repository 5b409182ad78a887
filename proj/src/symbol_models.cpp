#include "qsl/symbol_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qsl/errors.hpp"
#include "qsl/rng.hpp"

namespace qsl {

CriticalPoint verify_double_characteristic(const PolynomialSymbol& p0, const Vec& X,
                                           double tol, const PolynomialSymbol* p1,
                                           double ball_radius, int ball_samples) {
  if (static_cast<int>(X.size()) != p0.dim())
    throw InputError("candidate point has the wrong dimension");
  if (tol <= 0) throw InputError("verification tolerance must be positive");

  const CVec Xc = X.cast<Complex>();
  const double rv = std::abs(p0(Xc));
  const double rg = p0.gradient(Xc).norm();
  // !(rv <= tol) rather than rv > tol so NaN fails the check.
  if (!(rv <= tol)) {
    std::ostringstream os;
    os << "not characteristic: |p0(X)| = " << rv << " > " << tol;
    throw NotCharacteristic(os.str());
  }
  if (!(rg <= tol)) {
    std::ostringstream os;
    os << "not critical: |grad p0(X)| = " << rg << " > " << tol;
    throw NotCritical(os.str());
  }

  CriticalPoint cp;
  cp.X = X;
  cp.res_value = rv;
  cp.res_grad = rg;
  cp.qform = QuadraticForm(p0.n, CMat(0.5 * p0.hessian(Xc)));
  cp.p1_value = p1 ? (*p1)(Xc) : Complex(0, 0);

  // Sign condition: Re p0 should be >= 0. Sample a ball around X (axis
  // points at the full radius plus random interior points) and keep the
  // worst violation as a warning; sampling cannot certify the condition.
  const int d = p0.dim();
  double worst = 0.0;
  Vec worst_at;
  auto consider = [&](const Vec& Y) {
    const double re = std::real(p0(Y));
    if (re < worst) {
      worst = re;
      worst_at = Y;
    }
  };
  for (int j = 0; j < d; ++j) {
    Vec e = Vec::Zero(d);
    e[j] = ball_radius;
    consider(X + e);
    consider(X - e);
  }
  Rng rng(20177);
  for (int s = 0; s < ball_samples; ++s)
    consider(X + (ball_radius * rng.uniform()) * rng.sphere(d));
  if (worst < -tol) {
    std::ostringstream os;
    os << "Re p0 = " << worst << " at distance " << (worst_at - X).norm()
       << " from the critical point; the sign condition fails there";
    cp.warnings.push_back(os.str());
  }
  return cp;
}

std::vector<CriticalPoint> find_characteristic_points(const PolynomialSymbol& p0,
                                                      const std::vector<Vec>& seeds,
                                                      double tol,
                                                      const PolynomialSymbol* p1,
                                                      std::vector<Vec>* diverged) {
  if (tol <= 0) throw InputError("search tolerance must be positive");
  const int d = p0.dim();
  std::vector<CriticalPoint> out;

  auto grad_re = [&](const Vec& x) -> Vec { return p0.gradient(x.cast<Complex>()).real(); };

  for (const Vec& seed : seeds) {
    if (static_cast<int>(seed.size()) != d) throw InputError("seed has the wrong dimension");
    Vec x = seed;
    Vec g = grad_re(x);
    // Run the full budget rather than stopping at a gradient threshold:
    // degenerate directions (quartic valleys) only converge linearly, and
    // acceptance is decided by verify_double_characteristic anyway.
    for (int iter = 0; iter < 100 && g.norm() > 1e-15; ++iter) {
      const Mat H = p0.hessian(x.cast<Complex>()).real();
      Vec dx = Eigen::FullPivLU<Mat>(H).solve(-g);
      if (!dx.allFinite() || (H * dx + g).norm() > 1e-8 * std::max(1.0, g.norm()))
        dx = -g;  // singular or inconsistent Hessian: fall back to descent
      double s = 1.0;
      bool moved = false;
      while (s > 1e-14) {
        const Vec xn = x + s * dx;
        const Vec gn = grad_re(xn);
        if (gn.allFinite() && gn.norm() < g.norm()) {
          x = xn;
          g = gn;
          moved = true;
          break;
        }
        s *= 0.5;
      }
      if (!moved) break;
    }
    // Polish with Gauss-Newton on the full complex gradient. Newton on
    // grad Re p0 alone plateaus where Re p0 is degenerate beyond second
    // order (a quartic valley leaves |grad Im p0| linear in the offset), so
    // finish the job on the residual r = (Re grad p0, Im grad p0).
    auto resid = [&](const Vec& v) -> Vec {
      const CVec gc = p0.gradient(v.cast<Complex>());
      Vec r(2 * d);
      r << gc.real(), gc.imag();
      return r;
    };
    Vec r = resid(x);
    for (int iter = 0; iter < 40 && r.norm() > 5e-15; ++iter) {
      const CMat Hc = p0.hessian(x.cast<Complex>());
      Mat J(2 * d, d);
      J << Hc.real(), Hc.imag();
      const Vec dx = Eigen::ColPivHouseholderQR<Mat>(J).solve(-r);
      if (!dx.allFinite()) break;
      double s = 1.0;
      bool moved = false;
      while (s > 1e-14) {
        const Vec xn = x + s * dx;
        const Vec rn = resid(xn);
        if (rn.allFinite() && rn.norm() < r.norm()) {
          x = xn;
          r = rn;
          moved = true;
          break;
        }
        s *= 0.5;
      }
      if (!moved) break;
    }
    if (!x.allFinite()) {
      if (diverged) diverged->push_back(seed);
      continue;
    }
    try {
      CriticalPoint cp = verify_double_characteristic(p0, x, tol, p1);
      const bool dup = std::any_of(out.begin(), out.end(), [&](const CriticalPoint& q) {
        return (q.X - cp.X).norm() < 10.0 * tol;
      });
      if (!dup) out.push_back(std::move(cp));
    } catch (const NotCharacteristic&) {
      if (diverged) diverged->push_back(seed);
    } catch (const NotCritical&) {
      if (diverged) diverged->push_back(seed);
    }
  }
  return out;
}

bool AdmissibleRegion::admissible(Complex z) const {
  if (std::abs(z) > C_bound) return false;
  for (std::size_t j = 0; j < lattices.size(); ++j)
    if (lattices[j].distance(z - shifts[j]) < margin) return false;
  return true;
}

AdmissibleRegion make_admissible_region(const std::vector<CriticalPoint>& points,
                                        double C_bound, double margin, double tol) {
  if (C_bound <= 0 || margin <= 0)
    throw InputError("admissible region needs positive C_bound and margin");
  AdmissibleRegion region;
  region.C_bound = C_bound;
  region.margin = margin;
  for (const CriticalPoint& p : points) {
    // Radius large enough that every lattice point within reach of the disc
    // |z| <= C_bound is present after the shift.
    const double R = C_bound + std::abs(p.p1_value) + margin + 1.0;
    region.shifts.push_back(p.p1_value);
    region.lattices.push_back(quadratic_spectrum(p.qform, R, tol));
  }
  return region;
}

bool admissible_z(const std::vector<CriticalPoint>& points, Complex z, double margin,
                  double R, double tol) {
  if (margin <= 0) throw InputError("admissibility margin must be positive");
  for (const CriticalPoint& p : points) {
    const double Reff = std::max(R, std::abs(z) + std::abs(p.p1_value) + margin);
    const SpectrumLattice lat = quadratic_spectrum(p.qform, Reff, tol);
    if (lat.distance(z - p.p1_value) < margin) return false;
  }
  return true;
}

InfinityReport ellipticity_at_infinity_check(const PolynomialSymbol& p0, double C_test,
                                             int samples, std::uint64_t seed) {
  if (C_test <= 0) throw InputError("shell radius must be positive");
  if (samples < 1) throw InputError("need at least one sample");
  const int d = p0.dim();

  InfinityReport rep;
  rep.C_test = C_test;
  double best = std::numeric_limits<double>::infinity();
  Vec best_at = Vec::Zero(d);
  int evaluated = 0;
  auto consider = [&](const Vec& X) {
    const double re = std::real(p0(X));
    ++evaluated;
    if (re < best) {
      best = re;
      best_at = X;
    }
  };

  for (double r : {1.0, 2.0, 4.0})
    for (int j = 0; j < d; ++j) {
      Vec e = Vec::Zero(d);
      e[j] = r * C_test;
      consider(e);
      consider(-e);
    }
  Rng rng(seed);
  for (int s = 0; s < samples; ++s)
    consider((C_test * (1.0 + 3.0 * rng.uniform())) * rng.sphere(d));

  rep.samples = evaluated;
  rep.min_re = best;
  rep.argmin = best_at;
  rep.fitted_inv_C = std::max(best, 0.0);
  rep.positive = best > 0.0;
  return rep;
}

}  // namespace qsl
