#include "qsl/hermite.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qsl/errors.hpp"

namespace qsl {

long HermiteBasisSpec::dim() const {
  long d = 1;
  for (int j = 0; j < n; ++j) {
    d *= levels;
    if (d > cap) return d;  // stop before overflow; validate() reports
  }
  return d;
}

void HermiteBasisSpec::validate() const {
  if (n < 1) throw InputError("basis needs at least one degree of freedom");
  if (levels < 4) throw InputError("basis needs at least 4 levels per coordinate");
  if (!(h > 0.0)) throw InputError("semiclassical parameter must be positive");
  if (cap < 1) throw InputError("basis cap must be positive");
  if (dim() > cap)
    throw BasisCap("basis dimension " + std::to_string(dim()) + " exceeds cap " +
                   std::to_string(cap));
}

namespace {

// Annihilation operator on the first `m` levels: entry (k-1, k) = sqrt(k).
CMat ladder_lower(int m) {
  CMat A = CMat::Zero(m, m);
  for (int k = 1; k < m; ++k) A(k - 1, k) = std::sqrt(double(k));
  return A;
}

// One-coordinate Weyl matrix of x^a (h D)^b on `m` levels: the average of
// X/Xi factor products over all interleavings of a copies of X and b of Xi.
CMat weyl_1d(int a, int b, int m, double h) {
  const CMat A = ladder_lower(m);
  const CMat Adag = A.adjoint();
  const double s = std::sqrt(h / 2.0);
  const CMat X = s * (A + Adag);
  const CMat Xi = (s / Complex(0, 1)) * (A - Adag);

  if (a + b == 0) return CMat::Identity(m, m);

  // Interleavings as bit patterns: iterate distinct multiset permutations.
  std::vector<int> pattern(a, 0);
  pattern.resize(a + b, 1);  // a zeros (X) then b ones (Xi), lexicographic start
  CMat sum = CMat::Zero(m, m);
  long count = 0;
  do {
    CMat prod = CMat::Identity(m, m);
    for (int f : pattern) prod = prod * (f == 0 ? X : Xi);
    sum += prod;
    ++count;
  } while (std::next_permutation(pattern.begin(), pattern.end()));
  return sum / double(count);
}

}  // namespace

OperatorMatrix weyl_matrix(const PolynomialSymbol& symbol,
                           const HermiteBasisSpec& basis) {
  basis.validate();
  if (symbol.dim() != 2 * basis.n)
    throw InputError("symbol has " + std::to_string(symbol.dim() / 2) +
                     " degrees of freedom, basis has " + std::to_string(basis.n));

  const int n = basis.n;
  const int N = basis.levels;
  const long D = basis.dim();
  const int big = N + symbol.degree();  // keeps the retained block exact

  OperatorMatrix op;
  op.symbol = symbol;
  op.basis = basis;
  op.matrix = CMat::Zero(D, D);

  for (const auto& [k, c] : symbol.coeffs) {
    // Per-coordinate factors, truncated after the product is formed.
    CMat term = CMat::Identity(1, 1);
    for (int j = 0; j < n; ++j) {
      const CMat w = weyl_1d(k[j], k[n + j], big, basis.h).topLeftCorner(N, N);
      term = Eigen::kroneckerProduct(term, w).eval();
    }
    op.matrix += c * term;
  }
  return op;
}

}  // namespace qsl
