#include "qsl/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qsl {

const GaussLegendre& gauss_legendre(int m) {
  static std::map<int, GaussLegendre> cache;
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  if (m < 1 || m > 4096) throw std::invalid_argument("gauss_legendre: bad node count");

  // Jacobi matrix of the Legendre recurrence; eigenvalues are the nodes on
  // [-1, 1], weights are 2 * (first eigenvector component)^2.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);

  GaussLegendre gl;
  gl.nodes.resize(m);
  gl.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    gl.nodes[i] = 0.5 * (es.eigenvalues()[i] + 1.0);  // map to [0, 1]
    const double v0 = es.eigenvectors()(0, i);
    gl.weights[i] = v0 * v0;  // 2 v0^2 on [-1,1], halved by the affine map
  }
  return cache.emplace(m, std::move(gl)).first->second;
}

}  // namespace qsl
