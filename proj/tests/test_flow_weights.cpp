#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "qsl/errors.hpp"
#include "qsl/flow_weights.hpp"
#include "qsl/quadratic.hpp"
#include "qsl/quadrature.hpp"
#include "qsl/rng.hpp"
#include "qsl/symplectic.hpp"

using namespace qsl;
using namespace qsl::testing;

namespace {

// Closed forms of the flow integrals through augmented matrix exponentials:
// the top-right block of exp(T [[-B^T, C], [0, B]]) is
// int_0^T exp(-B^T (T-s)) C exp(s B) ds, so multiplying by exp(T B^T) on the
// left recovers int_0^T exp(s B^T) C exp(s B) ds.
Mat phi_integral(const Mat& B, const Mat& C, double T) {
  const int d = static_cast<int>(B.rows());
  Mat M = Mat::Zero(2 * d, 2 * d);
  M.topLeftCorner(d, d) = -B.transpose();
  M.topRightCorner(d, d) = C;
  M.bottomRightCorner(d, d) = B;
  const Mat E = (T * M).exp();
  return E.bottomRightCorner(d, d).transpose() * E.topRightCorner(d, d);
}

// Same device with a third block for int_0^T s exp(s B^T) C exp(s B) ds.
Mat phi_t_integral(const Mat& B, const Mat& C, double T) {
  const int d = static_cast<int>(B.rows());
  Mat M = Mat::Zero(3 * d, 3 * d);
  M.topLeftCorner(d, d) = -B.transpose();
  M.block(0, d, d, d) = C;
  M.block(d, d, d, d) = B;
  M.block(d, 2 * d, d, d) = Mat::Identity(d, d);
  M.bottomRightCorner(d, d) = B;
  const Mat E = (T * M).exp();
  return E.block(d, d, d, d).transpose() * E.topRightCorner(d, d);
}

Mat two_imf(const QuadraticForm& q) { return 2.0 * (-sigma_matrix(q.n) * q.im()); }

}  // namespace

TEST_SUITE("flow_weights") {

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
  for (int m : {4, 16, 48}) {
    const GaussLegendre& gl = gauss_legendre(m);
    REQUIRE(static_cast<int>(gl.nodes.size()) == m);
    double wsum = 0.0;
    for (int i = 0; i < m; ++i) {
      CHECK(gl.nodes[i] > 0.0);
      CHECK(gl.nodes[i] < 1.0);
      CHECK(gl.weights[i] > 0.0);
      wsum += gl.weights[i];
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    // Exact through degree 2m - 1.
    for (int k = 1; k < 2 * m; k += std::max(1, m / 3)) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i) acc += gl.weights[i] * std::pow(gl.nodes[i], k);
      CHECK(acc == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("flow average degenerate directions") {
  SUBCASE("real form: the flow is trivial and the average is Re Q") {
    Rng rng(3);
    Mat R = rng.normal_matrix(4, 4);
    const QuadraticForm q = form_from(2, Mat(R.transpose() * R), Mat::Zero(4, 4));
    for (double T : {0.25, 1.0, 4.0}) {
      const FlowAverage fa = flow_average(q, T);
      CHECK((fa.A - q.re()).norm() < 1e-12);
    }
  }
  SUBCASE("purely imaginary form: zero integrand") {
    const QuadraticForm q = scaled_oscillator(Complex(0, 1));
    const FlowAverage fa = flow_average(q, 1.0);
    CHECK(fa.A.norm() == 0.0);
    const QuadraticWeight w = weight_go(q, 1.0);
    CHECK(w.G.norm() == 0.0);
  }
  SUBCASE("T must be positive") {
    CHECK_THROWS_AS(flow_average(kfp_form(1.0), 0.0), InputError);
    CHECK_THROWS_AS(weight_go(kfp_form(1.0), -1.0), InputError);
  }
}

TEST_CASE("flow average against the augmented-exponential closed form") {
  for (double a : {0.5, 1.0, 2.0})
    for (double T : {0.25, 1.0, 4.0}) {
      CAPTURE(a);
      CAPTURE(T);
      const QuadraticForm q = kfp_form(a);
      const FlowAverage fa = flow_average(q, T);
      const Mat oracle = phi_integral(two_imf(q), q.re(), T) / T;
      CHECK((fa.A - oracle).norm() < 1e-11 * std::max(1.0, oracle.norm()));
      // Positive definite for this family (trivial singular space).
      Eigen::SelfAdjointEigenSolver<Mat> es(fa.A);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("escape weight against the closed form") {
  SUBCASE("real form: triangular weight integrates to T/2") {
    Rng rng(4);
    Mat R = rng.normal_matrix(2, 2);
    const QuadraticForm q = form_from(1, Mat(R.transpose() * R), Mat::Zero(2, 2));
    const QuadraticWeight w = weight_go(q, 3.0);
    CHECK((w.G - 1.5 * q.re()).norm() < 1e-12);
  }
  SUBCASE("kinetic Fokker-Planck weight") {
    for (double a : {0.5, 1.0, 2.0})
      for (double T : {0.25, 1.0, 4.0}) {
        CAPTURE(a);
        CAPTURE(T);
        const QuadraticForm q = kfp_form(a);
        const QuadraticWeight w = weight_go(q, T);
        const Mat B = two_imf(q);
        const Mat oracle = phi_integral(B, q.re(), T) - phi_t_integral(B, q.re(), T) / T;
        CHECK((w.G - oracle).norm() < 1e-11 * std::max(1.0, oracle.norm()));
      }
  }
  SUBCASE("doubled nodes reproduce the converged value") {
    const QuadraticForm q = kfp_form(1.0);
    const QuadraticWeight w1 = weight_go(q, 1.0);
    const QuadraticWeight w2 = weight_go(q, 1.0, 1e-12, 512);
    CHECK((w1.G - w2.G).norm() < 1e-11 * std::max(1.0, w1.G.norm()));
  }
}

TEST_CASE("escape identity holds exactly") {
  SUBCASE("kinetic Fokker-Planck") {
    for (double T : {0.25, 1.0, 4.0}) {
      const QuadraticForm q = kfp_form(1.0);
      const double r = check_escape_identity(q, weight_go(q, T), flow_average(q, T));
      CHECK(r < 1e-10);
    }
  }
  SUBCASE("random admissible forms") {
    Rng rng(11);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 1 + trial % 3;
      const QuadraticForm q = random_admissible(rng, n);
      const double r = check_escape_identity(q, weight_go(q, 1.0), flow_average(q, 1.0));
      worst = std::max(worst, r);
    }
    CHECK(worst < 1e-9);
  }
  SUBCASE("mismatched averaging times are rejected") {
    const QuadraticForm q = kfp_form(1.0);
    CHECK_THROWS_AS(check_escape_identity(q, weight_go(q, 1.0), flow_average(q, 2.0)),
                    InputError);
  }
}

TEST_CASE("weight and average respect the singular splitting") {
  Rng rng(21);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 2;
    const int n_sing = 1 + trial % 2;
    if (n_sing >= n) continue;
    const QuadraticForm q = random_partially_elliptic(rng, n, n_sing);
    const SingularSpace S = singular_space(q);
    REQUIRE(S.dim() == 2 * n_sing);
    for (double T : {0.25, 1.0, 4.0}) {
      const FlowAverage fa = flow_average(q, T);
      const QuadraticWeight w = weight_go(q, T);
      const double scale = std::max(1.0, w.G.norm());
      // G vanishes on the singular space entirely.
      CHECK((w.G * S.basis).norm() < 1e-9 * scale);
      // The average is positive definite transversally.
      const Mat Ap = S.basis_perp.transpose() * fa.A * S.basis_perp;
      Eigen::SelfAdjointEigenSolver<Mat> es(Ap);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("deformation algebra") {
  const QuadraticForm q = kfp_form(1.0);
  const QuadraticWeight w = weight_go(q, 1.0);
  SUBCASE("delta = 0 leaves the form untouched") {
    const DeformedForm d0 = deform(q, w, 0.0);
    CHECK((d0.form.Q - q.Q).norm() == 0.0);
    CHECK((d0.M - CMat::Identity(4, 4)).norm() == 0.0);
  }
  SUBCASE("exact expansion in delta") {
    const Mat S = sigma_matrix(2);
    const CMat Sc = S.cast<Complex>();
    const CMat Gc = w.G.cast<Complex>();
    const CMat D = Complex(0, 2) * (Gc * Sc * q.Q - q.Q * Sc * Gc);
    const CMat E = 4.0 * (Gc * Sc * q.Q * Sc * Gc);
    for (double delta : {0.2, 0.05, 0.01}) {
      const DeformedForm df = deform(q, w, delta);
      const CMat expect = q.Q + delta * D + delta * delta * E;
      CHECK((df.form.Q - expect).norm() < 1e-13 * std::max(1.0, expect.norm()));
      // First-order remainder shrinks linearly.
      CHECK(((df.form.Q - q.Q) / delta - D).norm() <
            1.5 * delta * E.norm() + 1e-12);
    }
  }
  SUBCASE("real part combines the average and a negative-semidefinite tail") {
    const FlowAverage fa = flow_average(q, 1.0);
    const Mat S = sigma_matrix(2);
    const Mat SG = S * w.G;
    for (double delta : {0.2, 0.05}) {
      const DeformedForm df = deform(q, w, delta);
      const Mat expect = (1.0 - delta) * q.re() + delta * fa.A -
                         4.0 * delta * delta * (SG.transpose() * q.re() * SG);
      CHECK((df.form.re() - expect).norm() < 1e-9 * std::max(1.0, expect.norm()));
    }
  }
}

TEST_CASE("ellipticity radius") {
  SUBCASE("elliptic oscillator: |q| = 1 on the whole sphere") {
    const QuadraticForm q = scaled_oscillator(1.0);
    const QuadraticWeight w = weight_go(q, 1.0);
    const DeformedForm d0 = deform(q, w, 0.0);
    CHECK(ellipticity_radius(d0) == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("undeformed kinetic Fokker-Planck vanishes on the sphere") {
    const QuadraticForm q = kfp_form(1.0);
    // Direct witness: the xi coordinate axis is characteristic.
    CVec X = CVec::Zero(4);
    X[2] = 1.0;
    CHECK(std::abs(q(X)) == 0.0);
    const QuadraticWeight w = weight_go(q, 1.0);
    const DeformedForm d0 = deform(q, w, 0.0);
    CHECK(ellipticity_radius(d0) < 1e-12);
  }
  SUBCASE("deformation restores ellipticity, linearly in delta") {
    const QuadraticForm q = kfp_form(1.0);
    const QuadraticWeight w = weight_go(q, 1.0);
    std::vector<double> ratio;
    for (double delta : {0.2, 0.1, 0.05, 0.025}) {
      const DeformedForm df = deform(q, w, delta);
      const double r = ellipticity_radius(df);
      CHECK(r > 0.0);
      ratio.push_back(r / delta);
    }
    const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
    CHECK(*hi / *lo < 4.0);
    // The deformed real part alone is already positive definite at 0.05.
    const DeformedForm df = deform(q, w, 0.05);
    Eigen::SelfAdjointEigenSolver<Mat> es(df.form.re());
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("quadrature failure surfaces as an error") {
  // Hyperbolic imaginary part: the flow grows like e^{t}, and T = 500
  // overflows the integrand beyond any node count.
  Mat re = Mat::Zero(2, 2), im = Mat::Zero(2, 2);
  re(0, 0) = 1.0;
  im(0, 1) = im(1, 0) = 0.5;
  const QuadraticForm q = form_from(1, re, im);
  CHECK_THROWS_AS(flow_average(q, 500.0), QuadratureNoConvergence);
}

}  // TEST_SUITE
