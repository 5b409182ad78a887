#include "qsl/flow_weights.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "qsl/errors.hpp"
#include "qsl/quadrature.hpp"
#include "qsl/rng.hpp"

namespace qsl {

namespace {

// int_0^T w(t/T) Phi(t) dt with node doubling; w is 1 (average) or 1 - s
// (escape weight).
Mat averaged_integral(const QuadraticForm& q, double T, double tol, int min_nodes,
                      bool triangular_weight) {
  if (T <= 0.0) throw InputError("flow average: T must be positive");
  if (min_nodes < 2) min_nodes = 2;
  const int dim = 2 * q.n;
  const Mat B = 2.0 * (-sigma_matrix(q.n) * q.im());
  const Mat reQ = q.re();

  Mat prev;
  bool have_prev = false;
  for (int m = min_nodes; m <= 2048; m *= 2) {
    const GaussLegendre& gl = gauss_legendre(m);
    Mat acc = Mat::Zero(dim, dim);
    for (int i = 0; i < m; ++i) {
      const double s = gl.nodes[i];
      const Mat E = (s * T * B).exp();
      const double w = triangular_weight ? (1.0 - s) : 1.0;
      acc += (gl.weights[i] * w) * (E.transpose() * reQ * E);
    }
    acc *= T;
    acc = (0.5 * (acc + acc.transpose())).eval();
    if (have_prev && (acc - prev).norm() <= tol * std::max(1.0, acc.norm())) return acc;
    prev = acc;
    have_prev = true;
  }
  std::ostringstream os;
  os << "flow integral did not settle to " << tol << " by 2048 nodes (T = " << T << ")";
  throw QuadratureNoConvergence(os.str());
}

}  // namespace

Mat flow_integrand(const QuadraticForm& q, double t) {
  const Mat B = 2.0 * (-sigma_matrix(q.n) * q.im());
  const Mat E = (t * B).exp();
  return E.transpose() * q.re() * E;
}

FlowAverage flow_average(const QuadraticForm& q, double T, double tol, int min_nodes) {
  FlowAverage out;
  out.T = T;
  out.A = averaged_integral(q, T, tol, min_nodes, false) / T;
  return out;
}

QuadraticWeight weight_go(const QuadraticForm& q, double T, double tol, int min_nodes) {
  QuadraticWeight out;
  out.T = T;
  out.G = averaged_integral(q, T, tol, min_nodes, true);
  return out;
}

double check_escape_identity(const QuadraticForm& q, const QuadraticWeight& G,
                             const FlowAverage& A) {
  if (G.T != A.T) throw InputError("escape identity: weight and average disagree on T");
  const Mat imF = -sigma_matrix(q.n) * q.im();
  const Mat lhs = 2.0 * (imF.transpose() * G.G + G.G * imF);
  const Mat rhs = A.A - q.re();
  return (lhs - rhs).norm() / (1.0 + q.re().norm());
}

DeformedForm deform(const QuadraticForm& q, const QuadraticWeight& G, double delta) {
  const int dim = 2 * q.n;
  const Mat K = -sigma_matrix(q.n) * G.G;  // H_G(X) = 2 K X
  DeformedForm out;
  out.delta = delta;
  out.M = CMat::Identity(dim, dim) + Complex(0.0, 2.0 * delta) * K.cast<Complex>();
  out.form = QuadraticForm(q.n, CMat(out.M.transpose() * q.Q * out.M));
  return out;
}

double ellipticity_radius(const DeformedForm& qd, int restarts, std::uint64_t seed) {
  const int dim = static_cast<int>(qd.form.Q.rows());
  const Mat Ru = qd.form.re();
  const Mat Iu = qd.form.im();

  const auto value2 = [&](const Vec& X) {
    const double u = X.dot(Ru * X), v = X.dot(Iu * X);
    return u * u + v * v;
  };
  // Descend |q~|^2 along the sphere-tangential gradient with backtracking.
  const auto descend = [&](Vec X) {
    X.normalize();
    double f = value2(X);
    for (int iter = 0; iter < 200; ++iter) {
      const double u = X.dot(Ru * X), v = X.dot(Iu * X);
      Vec g = 4.0 * (u * (Ru * X) + v * (Iu * X));
      g -= g.dot(X) * X;
      const double gn2 = g.squaredNorm();
      if (gn2 <= 1e-28) break;
      double step = 1.0;
      bool moved = false;
      while (step > 1e-18) {
        const Vec Y = (X - step * g).normalized();
        const double fy = value2(Y);
        if (fy <= f - 1e-4 * step * gn2) {
          X = Y;
          f = fy;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    return f;
  };

  double best = std::numeric_limits<double>::infinity();
  // Deterministic starts: coordinate axes always; for small dimensions the
  // full grid of {-1,0,1} directions as well.
  std::vector<Vec> starts;
  for (int i = 0; i < dim; ++i) {
    Vec e = Vec::Zero(dim);
    e[i] = 1.0;
    starts.push_back(e);
  }
  if (dim <= 4) {
    int count = 1;
    for (int i = 0; i < dim; ++i) count *= 3;
    for (int code = 0; code < count; ++code) {
      Vec v = Vec::Zero(dim);
      int rem = code;
      for (int i = 0; i < dim; ++i) {
        v[i] = static_cast<double>(rem % 3 - 1);
        rem /= 3;
      }
      if (v.norm() > 0.5) starts.push_back(v);
    }
  }
  Rng rng(seed);
  for (int r = 0; r < restarts; ++r) starts.push_back(rng.sphere(dim));

  for (const Vec& X0 : starts) best = std::min(best, descend(X0));
  return std::sqrt(best);
}

}  // namespace qsl
