#pragma once

// Gauss-Legendre rules on [0, 1], cached per node count. Nodes/weights come
// from the Golub-Welsch tridiagonal eigenproblem, which is accurate to
// machine precision for the sizes used here (<= 1024 nodes).

#include <vector>

namespace qsl {

struct GaussLegendre {
  std::vector<double> nodes;    // in (0, 1)
  std::vector<double> weights;  // sum to 1
};

const GaussLegendre& gauss_legendre(int m);

}  // namespace qsl
