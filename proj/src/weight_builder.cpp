#include "qsl/weight_builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qsl/errors.hpp"
#include "qsl/ode.hpp"
#include "qsl/quadrature.hpp"
#include "qsl/rng.hpp"

namespace qsl {

namespace {

constexpr double kBridge3 = 31.0 / 8, kBridge4 = 11.0 / 2, kBridge5 = 17.0 / 8;

// Combined state [X; vec(DX)]: the flow of H_{Im p0} = -sigma grad Im p0
// together with its variational equation.
OdeField variational_field(const PolynomialSymbol& p0, const Mat& S) {
  const int d = p0.dim();
  return [&p0, S, d](double, const Vec& y) {
    const CVec Xc = y.head(d).cast<Complex>();
    Vec out(d + d * d);
    out.head(d) = -(S * p0.gradient(Xc).imag());
    const Mat dH = -(S * p0.hessian(Xc).imag());
    Eigen::Map<const Mat> DX(y.data() + d, d, d);
    Eigen::Map<Mat>(out.data() + d, d, d) = dH * DX;
    return out;
  };
}

OdeField position_field(const PolynomialSymbol& p0, const Mat& S) {
  return [&p0, S](double, const Vec& y) {
    return Vec(-(S * p0.gradient(y.cast<Complex>()).imag()));
  };
}

OdeOptions ode_options(double tol_ode) {
  OdeOptions opts;
  opts.rel_tol = tol_ode;
  opts.abs_tol = 0.01 * tol_ode;
  return opts;
}

struct WeightValue {
  double val = 0.0;
  Vec grad;
};

WeightValue weight_eval(const PolynomialSymbol& p0, double eps, double T, const Vec& X,
                        const Vec* center, double tol_ode, double tol_quad,
                        int min_nodes, bool want_grad) {
  if (eps <= 0) throw InputError("mollification scale must be positive");
  if (T <= 0) throw InputError("averaging time must be positive");
  const int d = p0.dim();
  if (static_cast<int>(X.size()) != d)
    throw InputError("evaluation point has the wrong dimension");
  const Vec c = center ? *center : Vec(Vec::Zero(d));
  if (static_cast<int>(c.size()) != d)
    throw InputError("mollifier center has the wrong dimension");

  const Mat S = sigma_matrix(p0.n);
  const CutoffG g;
  const OdeOptions opts = ode_options(tol_ode);
  const OdeField field = want_grad ? variational_field(p0, S) : position_field(p0, S);
  Vec y0;
  if (want_grad) {
    y0.resize(d + d * d);
    y0.head(d) = X;
    Eigen::Map<Mat>(y0.data() + d, d, d) = Mat::Identity(d, d);
  } else {
    y0 = X;
  }

  double prev_val = std::numeric_limits<double>::quiet_NaN();
  Vec prev_grad = Vec::Zero(d);
  for (int m = std::clamp(min_nodes, 1, 2048); m <= 4096; m *= 2) {
    const GaussLegendre& gl = gauss_legendre(m);
    // Ascending sweep order (the rule is already sorted; keep it explicit).
    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return gl.nodes[a] < gl.nodes[b]; });
    std::vector<double> ts(m);
    for (int k = 0; k < m; ++k) ts[k] = T * gl.nodes[idx[k]];

    double val = 0.0;
    Vec grad = Vec::Zero(d);
    integrate_path(
        field, 0.0, y0, ts,
        [&](int k, const Vec& y) {
          const int i = idx[k];
          const double w = gl.weights[i] * (1.0 - gl.nodes[i]);
          const Vec Y = y.head(d);
          const Vec Yc = Y - c;
          const double u = Yc.squaredNorm() / eps;
          const double re = std::real(p0(Y));
          val += w * g(u) * re;
          if (want_grad) {
            Eigen::Map<const Mat> DX(y.data() + d, d, d);
            const Vec grad_m = (g.deriv(u) * (2.0 / eps) * re) * Yc +
                               g(u) * p0.gradient(Y.cast<Complex>()).real();
            grad.noalias() += w * (DX.transpose() * grad_m);
          }
        },
        opts);
    val *= T;
    grad *= T;

    if (std::isfinite(prev_val)) {
      const double scale = std::max(1.0, std::abs(val) + grad.norm());
      if (std::abs(val - prev_val) + (grad - prev_grad).norm() <= tol_quad * scale)
        return {val, grad};
    }
    prev_val = val;
    prev_grad = grad;
  }
  std::ostringstream os;
  os << "weight quadrature did not converge to " << tol_quad << " by 4096 nodes";
  throw QuadratureNoConvergence(os.str());
}

// Quintic smoothstep on [0,1] and its derivative.
double smoothstep(double u) { return u * u * u * (10.0 - 15.0 * u + 6.0 * u * u); }
double smoothstep_deriv(double u) {
  const double w = u * (1.0 - u);
  return 30.0 * w * w;
}

}  // namespace

double CutoffG::operator()(double t) const {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 1.0 / t;
  const double u = t - 1.0;
  return 1.0 + u * u * u * (-kBridge3 + u * (kBridge4 - u * kBridge5));
}

double CutoffG::deriv(double t) const {
  if (t <= 1.0) return 0.0;
  if (t >= 2.0) return -1.0 / (t * t);
  const double u = t - 1.0;
  return u * u * (-3.0 * kBridge3 + u * (4.0 * kBridge4 - 5.0 * u * kBridge5));
}

double CutoffG::deriv2(double t) const {
  if (t <= 1.0) return 0.0;
  if (t >= 2.0) return 2.0 / (t * t * t);
  const double u = t - 1.0;
  return u * (-6.0 * kBridge3 + u * (12.0 * kBridge4 - 20.0 * u * kBridge5));
}

FlowState flow(const PolynomialSymbol& p0, const Vec& X, double t, double tol_ode) {
  const int d = p0.dim();
  if (static_cast<int>(X.size()) != d)
    throw InputError("flow start point has the wrong dimension");
  const Mat S = sigma_matrix(p0.n);
  Vec y0(d + d * d);
  y0.head(d) = X;
  Eigen::Map<Mat>(y0.data() + d, d, d) = Mat::Identity(d, d);
  const Vec y = integrate_ode(variational_field(p0, S), 0.0, y0, t, ode_options(tol_ode));
  FlowState st;
  st.X_t = y.head(d);
  st.DX_t = Eigen::Map<const Mat>(y.data() + d, d, d);
  st.t = t;
  return st;
}

double mollified_repart(const PolynomialSymbol& p0, double eps, const Vec& X,
                        const Vec* center) {
  if (eps <= 0) throw InputError("mollification scale must be positive");
  const int d = p0.dim();
  if (static_cast<int>(X.size()) != d)
    throw InputError("evaluation point has the wrong dimension");
  const Vec c = center ? *center : Vec(Vec::Zero(d));
  const CutoffG g;
  return g((X - c).squaredNorm() / eps) * std::real(p0(X));
}

std::pair<double, Vec> weight_G_eps(const PolynomialSymbol& p0, double eps, double T,
                                    const Vec& X, double tol_ode, double tol_quad,
                                    const Vec* center, int min_nodes) {
  WeightValue w = weight_eval(p0, eps, T, X, center, tol_ode, tol_quad, min_nodes, true);
  return {w.val, std::move(w.grad)};
}

double weight_G_eps_value(const PolynomialSymbol& p0, double eps, double T, const Vec& X,
                          double tol_ode, double tol_quad, const Vec* center,
                          int min_nodes) {
  return weight_eval(p0, eps, T, X, center, tol_ode, tol_quad, min_nodes, false).val;
}

namespace {

std::vector<Vec> effective_centers(const std::vector<Vec>& centers, int d) {
  if (centers.empty()) return {Vec(Vec::Zero(d))};
  for (const Vec& c : centers)
    if (static_cast<int>(c.size()) != d) throw InputError("center has the wrong dimension");
  return centers;
}

}  // namespace

std::pair<double, Vec> WeightField::value_gradient(const Vec& X) const {
  const int d = p0.dim();
  const std::vector<Vec> cs = effective_centers(centers, d);
  if (cs.size() > 1 && bump_radius <= 0)
    throw InputError("gluing several centers requires a positive bump radius");
  if (bump_radius <= 0)
    return weight_G_eps(p0, epsilon, T, X, tol_ode, tol_quad, &cs[0]);

  double val = 0.0;
  Vec grad = Vec::Zero(d);
  for (const Vec& cj : cs) {
    const double r = (X - cj).norm();
    if (r >= bump_radius) continue;
    double chi = 1.0, dchi = 0.0;  // radial cutoff and d(chi)/dr
    if (r > 0.5 * bump_radius) {
      const double u = (r - 0.5 * bump_radius) / (0.5 * bump_radius);
      chi = 1.0 - smoothstep(u);
      dchi = -smoothstep_deriv(u) / (0.5 * bump_radius);
    }
    const auto [v, gv] = weight_G_eps(p0, epsilon, T, X, tol_ode, tol_quad, &cj);
    val += chi * v;
    grad += chi * gv;
    if (dchi != 0.0 && r > 0.0) grad += (dchi * v / r) * (X - cj);
  }
  return {val, grad};
}

double WeightField::value(const Vec& X) const {
  const int d = p0.dim();
  const std::vector<Vec> cs = effective_centers(centers, d);
  if (cs.size() > 1 && bump_radius <= 0)
    throw InputError("gluing several centers requires a positive bump radius");
  if (bump_radius <= 0)
    return weight_G_eps_value(p0, epsilon, T, X, tol_ode, tol_quad, &cs[0]);
  double val = 0.0;
  for (const Vec& cj : cs) {
    const double r = (X - cj).norm();
    if (r >= bump_radius) continue;
    double chi = 1.0;
    if (r > 0.5 * bump_radius)
      chi = 1.0 - smoothstep((r - 0.5 * bump_radius) / (0.5 * bump_radius));
    val += chi * weight_G_eps_value(p0, epsilon, T, X, tol_ode, tol_quad, &cj);
  }
  return val;
}

bool PropReport::all_pass() const {
  return std::all_of(items.begin(), items.end(),
                     [](const PropItem& it) { return it.pass; });
}

PropReport verify_prop1(const PolynomialSymbol& p0, const std::vector<Vec>& centers_in,
                        double eps, double delta, double T, const PropGrid& grid,
                        double tol_ode, double tol_quad, bool strict) {
  if (eps <= 0 || T <= 0) throw InputError("verify_prop1 needs positive eps and T");
  if (delta < 0) throw InputError("deformation size must be >= 0");
  if (grid.C <= 0) throw InputError("grid outer scale 1/C needs C > 0");
  const int d = p0.dim();
  const std::vector<Vec> centers = effective_centers(centers_in, d);

  const double root_eps = std::sqrt(eps);
  const double outer = 1.0 / grid.C;
  std::vector<double> radii = grid.radii;
  if (radii.empty()) {
    radii.push_back(0.5 * root_eps);
    for (double r = root_eps; r < outer * (1.0 - 1e-12); r *= 2.0) radii.push_back(r);
    radii.push_back(outer);
  }
  std::vector<Vec> dirs;
  for (int j = 0; j < d; ++j) {
    Vec e = Vec::Zero(d);
    e[j] = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  Rng rng(grid.seed);
  for (int s = 0; s < grid.angular; ++s) dirs.push_back(rng.sphere(d));

  // Gluing radius: none for a single center, else half-way to the nearest
  // neighbour (capped by the grid's outer scale).
  double bump = 0.0;
  if (centers.size() > 1) {
    double minsep = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a + 1 < centers.size(); ++a)
      for (std::size_t b = a + 1; b < centers.size(); ++b)
        minsep = std::min(minsep, (centers[a] - centers[b]).norm());
    bump = std::min(outer, 0.5 * minsep);
  }
  WeightField field{p0, eps, T, centers, bump, tol_ode, tol_quad};

  auto dist_to_centers = [&](const Vec& X) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& c : centers) best = std::min(best, (X - c).norm());
    return best;
  };

  struct Sample {
    Vec X;
    double dist;
    double G;
    Vec grad;
  };
  std::vector<Sample> samples;
  samples.reserve(centers.size() * radii.size() * dirs.size());
  for (const Vec& c : centers)
    for (double r : radii)
      for (const Vec& dir : dirs) {
        Sample s;
        s.X = c + r * dir;
        s.dist = dist_to_centers(s.X);
        const auto [v, g] = field.value_gradient(s.X);
        s.G = v;
        s.grad = g;
        samples.push_back(std::move(s));
      }

  PropReport rep;
  rep.epsilon = eps;
  rep.delta = delta;
  rep.T = T;
  rep.grid_points = static_cast<int>(samples.size());

  const Mat S = sigma_matrix(p0.n);
  auto deformed_value = [&](const Sample& s) -> Complex {
    const Vec H = -(S * s.grad);  // Hamilton field of the weight at X
    const CVec Z = s.X.cast<Complex>() + Complex(0, delta) * H.cast<Complex>();
    return p0(Z);
  };

  // (i): size of the weight and of its second derivatives.
  {
    PropItem& it = rep.items[0];
    double k1 = 0.0;
    Vec at1;
    for (const Sample& s : samples)
      if (std::abs(s.G) / eps > k1) {
        k1 = std::abs(s.G) / eps;
        at1 = s.X;
      }
    double k2 = 0.0;
    const double h = std::max(1e-2 * root_eps, 1e-5);
    const std::size_t stride = std::max<std::size_t>(1, samples.size() / 12);
    for (std::size_t i = 0; i < samples.size(); i += stride) {
      Mat hess(d, d);
      for (int j = 0; j < d; ++j) {
        Vec e = Vec::Zero(d);
        e[j] = h;
        hess.col(j) = (field.value_gradient(samples[i].X + e).second -
                       field.value_gradient(samples[i].X - e).second) /
                      (2.0 * h);
      }
      hess = (0.5 * (hess + hess.transpose())).eval();
      k2 = std::max(k2, hess.norm());
    }
    it.fitted = k1;
    it.worst = k2;
    it.worst_at = at1;
    it.pass = std::isfinite(k1) && std::isfinite(k2) && k1 <= 1e6 && k2 <= 1e6;
    it.note = "fitted = sup|G|/eps; worst = sup ||d2G|| over a grid subsample";
  }

  // (ii): |grad G| against dist where dist <= sqrt(eps).
  {
    PropItem& it = rep.items[1];
    double c2 = 0.0;
    Vec at;
    bool seen = false;
    for (const Sample& s : samples) {
      if (s.dist > root_eps || s.dist <= 0) continue;
      seen = true;
      const double ratio = s.grad.norm() / s.dist;
      if (ratio > c2) {
        c2 = ratio;
        at = s.X;
      }
    }
    it.fitted = c2;
    it.worst = c2;
    it.worst_at = at;
    it.pass = seen && std::isfinite(c2) && c2 <= 1e6;
    it.note = "fitted = sup |grad G| / dist on dist <= sqrt(eps)";
  }

  // (iii): |grad G| against sqrt(eps) where dist >= sqrt(eps).
  {
    PropItem& it = rep.items[2];
    double c3 = 0.0;
    Vec at;
    bool seen = false;
    for (const Sample& s : samples) {
      if (s.dist < root_eps) continue;
      seen = true;
      const double ratio = s.grad.norm() / root_eps;
      if (ratio > c3) {
        c3 = ratio;
        at = s.X;
      }
    }
    it.fitted = c3;
    it.worst = c3;
    it.worst_at = at;
    it.pass = seen && std::isfinite(c3) && c3 <= 1e6;
    it.note = "fitted = sup |grad G| / sqrt(eps) on dist >= sqrt(eps)";
  }

  // (iv): |p0(X + i delta H_G)| >= (delta/C~) min(dist^2, eps).
  {
    PropItem& it = rep.items[3];
    double m4 = std::numeric_limits<double>::infinity();
    Vec at;
    for (const Sample& s : samples) {
      const double bound = std::min(s.dist * s.dist, eps);
      if (bound <= 0) continue;
      const double ratio = std::abs(deformed_value(s)) / bound;
      if (ratio < m4) {
        m4 = ratio;
        at = s.X;
      }
    }
    it.worst = m4;
    it.worst_at = at;
    if (delta <= 0) {
      it.pass = false;
      it.fitted = 0.0;
      it.note = "lower bound degenerates at delta = 0";
    } else {
      it.fitted = delta / m4;  // the certified C~
      it.pass = m4 > 1e-14 && it.fitted <= 1e6;
      it.note = "fitted C~ = delta / worst, worst = min |p0(X+i delta H_G)| / min(dist^2, eps)";
    }
  }

  // (v): a rotation makes the real part positive where dist >= sqrt(eps).
  {
    PropItem& it = rep.items[4];
    const double scan[] = {-4, -2, -1, -0.5, -0.25, 0.25, 0.5, 1, 2, 4};
    double best_m5 = -std::numeric_limits<double>::infinity();
    double best_c = 0.0;
    Vec best_at;
    for (double ct : scan) {
      double m5 = std::numeric_limits<double>::infinity();
      Vec at;
      for (const Sample& s : samples) {
        if (s.dist < root_eps) continue;
        const Complex rot =
            Complex(1.0, 0.0) - Complex(0, ct * delta * eps / (s.dist * s.dist));
        const double re = std::real(rot * deformed_value(s));
        if (re < m5) {
          m5 = re;
          at = s.X;
        }
      }
      if (m5 > best_m5) {
        best_m5 = m5;
        best_c = ct;
        best_at = at;
      }
    }
    rep.c_tilde = best_c;
    it.worst = best_m5;
    it.worst_at = best_at;
    it.pass = best_m5 > 0;
    if (delta > 0) {
      it.fitted = (best_m5 > 0) ? delta * eps / best_m5 : 0.0;
      it.note = "fitted = delta eps / min Re((1 - i c~ delta eps/dist^2) p0~)";
    } else {
      it.fitted = 0.0;
      it.note = "vacuous at delta = 0: certifies Re p0 > 0 on dist >= sqrt(eps)";
    }
  }

  if (strict && !rep.all_pass()) {
    std::ostringstream os;
    os << "certification failed on the grid:";
    for (std::size_t i = 0; i < rep.items.size(); ++i)
      if (!rep.items[i].pass) os << " item " << (i + 1) << " (" << rep.items[i].note << ")";
    throw FitFailure(os.str());
  }
  return rep;
}

}  // namespace qsl
