#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "qsl/errors.hpp"
#include "qsl/flow_weights.hpp"
#include "qsl/ode.hpp"
#include "qsl/polynomial.hpp"
#include "qsl/quadratic.hpp"
#include "qsl/rng.hpp"
#include "qsl/weight_builder.hpp"

using namespace qsl;
using namespace qsl::testing;

namespace {

// Im p0 = x^2 xi: the flow dx/dt = x^2 blows up in finite time.
PolynomialSymbol cubic_drift() {
  const PolynomialSymbol x = poly_coordinate(1, 0), xi = poly_coordinate(1, 1);
  return Complex(0, 1) * (x * x * xi);
}

}  // namespace

TEST_SUITE("weight_builder") {

TEST_CASE("integrator against closed forms") {
  SUBCASE("scalar exponential, both directions") {
    auto f = [](double, const Vec& y) { return Vec(-2.3 * y); };
    Vec y0(1);
    y0 << 1.5;
    const Vec yf = integrate_ode(f, 0.0, y0, 1.7);
    CHECK(std::abs(yf[0] - 1.5 * std::exp(-2.3 * 1.7)) < 1e-9);
    const Vec yb = integrate_ode(f, 0.0, y0, -1.0);
    CHECK(std::abs(yb[0] - 1.5 * std::exp(2.3)) < 1e-8);
  }
  SUBCASE("rotation preserves the norm") {
    auto f = [](double, const Vec& y) {
      Vec d(2);
      d << y[1], -y[0];
      return d;
    };
    Vec y0(2);
    y0 << 0.3, -1.1;
    const Vec yf = integrate_ode(f, 0.0, y0, M_PI);
    CHECK((yf + y0).norm() < 1e-9);
    CHECK(yf.norm() == doctest::Approx(y0.norm()).epsilon(1e-10));
  }
  SUBCASE("checkpoints agree with one-shot integration") {
    auto f = [](double t, const Vec& y) { return Vec(std::cos(t) * y); };
    Vec y0(1);
    y0 << 1.0;
    const std::vector<double> ts = {0.25, 0.5, 1.0};
    std::vector<double> seen;
    integrate_path(f, 0.0, y0, ts, [&](int, const Vec& y) { seen.push_back(y[0]); });
    for (std::size_t i = 0; i < ts.size(); ++i)
      CHECK(std::abs(seen[i] - std::exp(std::sin(ts[i]))) < 1e-9);
    CHECK_THROWS_AS(integrate_path(f, 0.0, y0, {0.5, 0.3}, [](int, const Vec&) {}),
                    InputError);
  }
  SUBCASE("finite-time blowup surfaces as a step failure") {
    auto f = [](double, const Vec& y) { return Vec(y.cwiseProduct(y)); };
    Vec y0(1);
    y0 << 1.0;
    CHECK_THROWS_AS(integrate_ode(f, 0.0, y0, 1.5), OdeStepFailure);
    OdeOptions tight;
    tight.max_steps = 5;
    auto g = [](double, const Vec& y) { return Vec(-y); };
    CHECK_THROWS_AS(integrate_ode(g, 0.0, y0, 10.0, tight), OdeStepFailure);
  }
}

TEST_CASE("cutoff function bridge") {
  const CutoffG g;
  CHECK(g(0.0) == 1.0);
  CHECK(g(1.0) == 1.0);
  CHECK(g(2.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(g(4.0) == 0.25);
  SUBCASE("matching at the seams") {
    for (double t : {1.0, 2.0}) {
      CHECK(std::abs(g(t + 1e-9) - g(t - 1e-9)) < 1e-8);
      CHECK(std::abs(g.deriv(t + 1e-9) - g.deriv(t - 1e-9)) < 1e-7);
      CHECK(std::abs(g.deriv2(t + 1e-9) - g.deriv2(t - 1e-9)) < 1e-6);
    }
  }
  SUBCASE("decreasing with bounded slope") {
    double prev = g(0.0);
    for (double t = 0.05; t <= 5.0; t += 0.05) {
      CHECK(g(t) <= prev + 1e-15);
      CHECK(std::abs(g.deriv(t)) <= 1.1);
      prev = g(t);
    }
  }
  SUBCASE("derivatives against finite differences on the bridge") {
    const double h = 1e-6;
    for (double t = 1.05; t < 2.0; t += 0.1) {
      CHECK(std::abs((g(t + h) - g(t - h)) / (2 * h) - g.deriv(t)) < 1e-8);
      CHECK(std::abs((g.deriv(t + h) - g.deriv(t - h)) / (2 * h) - g.deriv2(t)) < 1e-7);
    }
  }
}

TEST_CASE("hamiltonian flow of the imaginary part") {
  SUBCASE("real symbol: static flow") {
    const PolynomialSymbol x = poly_coordinate(1, 0), xi = poly_coordinate(1, 1);
    Vec X(2);
    X << 0.7, -0.4;
    const FlowState st = flow(x * x + xi * xi, X, 2.0);
    CHECK((st.X_t - X).norm() == 0.0);
    CHECK((st.DX_t - Mat::Identity(2, 2)).norm() == 0.0);
  }
  SUBCASE("quadratic symbol matches the matrix exponential") {
    const QuadraticForm q = kfp_form(1.0);
    const PolynomialSymbol p = poly_from_quadratic(q);
    const Mat B = 2.0 * (-sigma_matrix(2) * q.im());
    Rng rng(31);
    for (double t : {0.7, -0.4}) {
      const Vec X = rng.normal_vector(4);
      const FlowState st = flow(p, X, t, 1e-11);
      const Mat E = (t * B).exp();
      CHECK((st.X_t - E * X).norm() < 1e-9 * std::max(1.0, X.norm()));
      CHECK((st.DX_t - E).norm() < 1e-9 * std::max(1.0, E.norm()));
    }
  }
  SUBCASE("Im p0 is conserved along its own flow") {
    const PolynomialSymbol p0 = quartic_symbol(0.8, 1.0, 0.5);
    Rng rng(32);
    for (int trial = 0; trial < 5; ++trial) {
      const Vec X = 0.4 * rng.sphere(4);
      const FlowState st = flow(p0, X, 1.0, 1e-11);
      const double before = std::imag(p0(X));
      const double after = std::imag(p0(st.X_t));
      CHECK(std::abs(after - before) < 1e-9 * std::max(1.0, std::abs(before)));
    }
  }
  SUBCASE("variational matrix matches the finite-difference jacobian") {
    Rng rng(33);
    const double h = 1e-5;
    const PolynomialSymbol models[] = {quartic_symbol(0.8, 1.0, 0.5), cubic_drift()};
    for (const PolynomialSymbol& p0 : models) {
      const int d = p0.dim();
      const Vec X = 0.5 * rng.sphere(d);
      const FlowState st = flow(p0, X, 0.3, 1e-11);
      for (int j = 0; j < d; ++j) {
        Vec e = Vec::Zero(d);
        e[j] = h;
        const Vec col =
            (flow(p0, X + e, 0.3, 1e-11).X_t - flow(p0, X - e, 0.3, 1e-11).X_t) / (2 * h);
        CHECK((col - st.DX_t.col(j)).norm() < 1e-5 * std::max(1.0, st.DX_t.col(j).norm()));
      }
    }
  }
  SUBCASE("finite-time blowup propagates") {
    Vec X(2);
    X << 1.0, 1.0;
    CHECK_THROWS_AS(flow(cubic_drift(), X, 1.5), OdeStepFailure);
  }
}

TEST_CASE("mollified real part") {
  const PolynomialSymbol p0 = quartic_symbol(1.2, 0.7, -0.3);
  const double eps = 0.01;
  SUBCASE("inner region is untouched, outer region is rescaled") {
    Rng rng(41);
    const Vec Xin = std::sqrt(0.5 * eps) * rng.sphere(4);
    CHECK(mollified_repart(p0, eps, Xin) == std::real(p0(Xin)));
    const Vec Xout = 0.8 * rng.sphere(4);
    const double expect = eps * std::real(p0(Xout)) / Xout.squaredNorm();
    CHECK(mollified_repart(p0, eps, Xout) == doctest::Approx(expect).epsilon(1e-14));
  }
  SUBCASE("sup over a grid scales linearly in eps") {
    Rng rng(42);
    std::vector<Vec> grid;
    for (int i = 0; i < 200; ++i) grid.push_back((2.0 * rng.uniform()) * rng.sphere(4));
    double prev = -1.0;
    for (double e : {0.04, 0.02, 0.01}) {
      double sup = 0.0;
      for (const Vec& X : grid) sup = std::max(sup, std::abs(mollified_repart(p0, e, X)));
      const double K = sup / e;
      if (prev > 0) {
        CHECK(K / prev < 2.0);
        CHECK(prev / K < 2.0);
      }
      prev = K;
    }
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(mollified_repart(p0, 0.0, Vec::Zero(4)), InputError);
  }
}

TEST_CASE("weight reduces to the quadratic closed form near the origin") {
  const QuadraticForm q = kfp_form(1.0);
  const PolynomialSymbol p = poly_from_quadratic(q);
  const double eps = 0.01, T = 1.0;
  const Mat G = weight_go(q, T).G;
  Rng rng(51);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec X = 0.004 * rng.sphere(4);
    const auto [v, grad] = weight_G_eps(p, eps, T, X, 1e-12, 1e-10);
    const double expect = X.transpose() * G * X;
    CHECK(std::abs(v - expect) < 1e-8 * std::max(std::abs(expect), 1e-6));
    const Vec gexpect = 2.0 * (G * X);
    CHECK((grad - gexpect).norm() < 1e-8 * std::max(gexpect.norm(), 1e-4));
  }
  SUBCASE("static symbol: the weight is the triangular average of the mollified part") {
    const PolynomialSymbol x = poly_coordinate(1, 0), xi = poly_coordinate(1, 1);
    const PolynomialSymbol real_p = x * x + xi * xi;
    Vec X(2);
    X << 0.9, -0.3;
    const double v = weight_G_eps_value(real_p, eps, 2.0, X);
    CHECK(v == doctest::Approx(1.0 * mollified_repart(real_p, eps, X)).epsilon(1e-10));
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(weight_G_eps(p, -1.0, 1.0, Vec::Zero(4)), InputError);
    CHECK_THROWS_AS(weight_G_eps(p, 0.01, 0.0, Vec::Zero(4)), InputError);
  }
}

TEST_CASE("weight gradient against finite differences") {
  const PolynomialSymbol p0 = quartic_symbol(0.0, 1.0, 0.0);
  const double eps = 0.01, T = 1.0;
  Rng rng(52);
  int tested = 0;
  while (tested < 8) {
    const Vec X = (0.5 + 0.5 * rng.uniform()) * rng.sphere(4);
    // Keep to starts whose flow stays on the outer branch of the cutoff so
    // the integrand is analytic and node counts are stable under the probes.
    bool clear = true;
    for (int k = 0; k <= 128 && clear; ++k) {
      const FlowState st = flow(p0, X, T * k / 128.0, 1e-9);
      if (st.X_t.squaredNorm() / eps < 2.05) clear = false;
    }
    if (!clear) continue;
    ++tested;
    const auto [v, grad] = weight_G_eps(p0, eps, T, X, 1e-12, 1e-9, nullptr, 512);
    const double h = 3e-4;
    Vec fd(4);
    for (int j = 0; j < 4; ++j) {
      Vec e = Vec::Zero(4);
      e[j] = h;
      fd[j] = (weight_G_eps_value(p0, eps, T, X + e, 1e-12, 1e-9, nullptr, 512) -
               weight_G_eps_value(p0, eps, T, X - e, 1e-12, 1e-9, nullptr, 512)) /
              (2 * h);
    }
    CHECK((fd - grad).norm() < 1e-6 * std::max(grad.norm(), 5e-3));
  }
}

TEST_CASE("glued weight over several centers") {
  // Static two-well symbol: the per-center weights are closed-form.
  const PolynomialSymbol x = poly_coordinate(1, 0), xi = poly_coordinate(1, 1);
  const PolynomialSymbol one = poly_constant(1, 1.0);
  const PolynomialSymbol w = x * x - one;
  const PolynomialSymbol p = xi * xi + w * w;
  const double eps = 0.04, T = 1.0;
  WeightField field;
  field.p0 = p;
  field.epsilon = eps;
  field.T = T;
  field.centers.resize(2, Vec(2));
  field.centers[0] << 1.0, 0.0;
  field.centers[1] << -1.0, 0.0;
  field.bump_radius = 1.0;

  Vec c0 = field.centers[0];
  SUBCASE("inside a plateau only that center contributes") {
    Vec X(2);
    X << 1.1, 0.05;
    const auto [v, grad] = field.value_gradient(X);
    const auto [v0, g0] = weight_G_eps(p, eps, T, X, 1e-10, 1e-8, &c0);
    CHECK(v == doctest::Approx(v0).epsilon(1e-12));
    CHECK((grad - g0).norm() < 1e-12 * std::max(1.0, g0.norm()));
  }
  SUBCASE("midpoint is outside every bump") {
    CHECK(field.value(Vec::Zero(2)) == 0.0);
  }
  SUBCASE("gradient through the bump shoulder matches finite differences") {
    Vec X(2);
    X << 0.3, 0.1;  // distance 0.707 from the near center: on the shoulder
    const auto [v, grad] = field.value_gradient(X);
    const double h = 1e-5;
    Vec fd(2);
    for (int j = 0; j < 2; ++j) {
      Vec e = Vec::Zero(2);
      e[j] = h;
      fd[j] = (field.value(X + e) - field.value(X - e)) / (2 * h);
    }
    CHECK((fd - grad).norm() < 1e-6 * std::max(grad.norm(), 1e-6));
    CHECK(v > 0.0);
  }
  SUBCASE("gluing requires a bump radius") {
    WeightField bad = field;
    bad.bump_radius = 0.0;
    CHECK_THROWS_AS(bad.value(Vec::Zero(2)), InputError);
  }
}

TEST_CASE("certification of the weight's lower bounds") {
  const PolynomialSymbol p0 = quartic_symbol(0.0, 1.0, 0.0);
  const std::vector<Vec> centers(1, Vec(Vec::Zero(4)));
  SUBCASE("quartic model certifies at delta = 0.05") {
    const PropReport rep = verify_prop1(p0, centers, 0.01, 0.05, 1.0);
    CHECK(rep.grid_points == 144);
    for (int i = 0; i < 5; ++i) {
      CAPTURE(i);
      CAPTURE(rep.items[i].fitted);
      CAPTURE(rep.items[i].worst);
      CHECK(rep.items[i].pass);
    }
    CHECK(rep.all_pass());
    CHECK(rep.items[3].fitted > 0.0);
    CHECK(std::abs(rep.c_tilde) <= 4.0);
  }
  SUBCASE("delta = 0 fails the deformed lower bound") {
    const PropReport rep = verify_prop1(p0, centers, 0.01, 0.0, 1.0);
    CHECK_FALSE(rep.items[3].pass);
    CHECK_FALSE(rep.all_pass());
    CHECK(rep.items[0].pass);  // the weight itself is fine
    CHECK_THROWS_AS(verify_prop1(p0, centers, 0.01, 0.0, 1.0, {}, 1e-10, 1e-8, true),
                    FitFailure);
  }
  SUBCASE("quadratic symbol: item (iv) tracks the deformed-form ellipticity") {
    const QuadraticForm q = kfp_form(1.0);
    const PolynomialSymbol p = poly_from_quadratic(q);
    const double delta = 0.05, T = 1.0;
    const PropReport rep = verify_prop1(p, centers, 0.01, delta, T);
    CHECK(rep.items[3].pass);
    const DeformedForm df = deform(q, weight_go(q, T), delta);
    const double r_delta = ellipticity_radius(df);
    CAPTURE(rep.items[3].worst);
    CAPTURE(r_delta);
    CHECK(rep.items[3].worst > 0.05 * r_delta);
    CHECK(rep.items[3].worst < 20.0 * r_delta);
  }
}

TEST_CASE("weight size scales with eps") {
  const PolynomialSymbol p0 = quartic_symbol(0.0, 1.0, 0.0);
  Rng rng(61);
  std::vector<Vec> grid;
  for (int i = 0; i < 12; ++i) grid.push_back((0.05 + 0.95 * rng.uniform()) * rng.sphere(4));
  double prev = -1.0;
  for (double eps : {0.04, 0.02, 0.01}) {
    double sup = 0.0;
    for (const Vec& X : grid)
      sup = std::max(sup, std::abs(weight_G_eps_value(p0, eps, 1.0, X)));
    const double K = sup / eps;
    CAPTURE(eps);
    CAPTURE(K);
    if (prev > 0) {
      CHECK(K / prev < 2.0);
      CHECK(prev / K < 2.0);
    }
    prev = K;
  }
}

}  // TEST_SUITE
