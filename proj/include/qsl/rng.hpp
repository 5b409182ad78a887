#pragma once

// Deterministic random sampling. mt19937_64 is bit-exact across platforms,
// but the standard *distributions* are not, so the transforms here are spelled
// out by hand: identical seed => identical stream => byte-identical reports.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>

namespace qsl {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on [0, 1) with 53 significant bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Box-Muller; one deviate per call, the twin is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  Eigen::VectorXd normal_vector(int dim) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = normal();
    return v;
  }

  // Uniform direction on the unit sphere in R^dim.
  Eigen::VectorXd sphere(int dim) {
    Eigen::VectorXd v = normal_vector(dim);
    double nrm = v.norm();
    while (nrm < 1e-12) {
      v = normal_vector(dim);
      nrm = v.norm();
    }
    return v / nrm;
  }

  Eigen::MatrixXd normal_matrix(int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace qsl
