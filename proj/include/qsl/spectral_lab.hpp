#pragma once

// Low-lying eigenvalues and resolvent-norm scans of Weyl-quantized symbols.
//
// Everything here is desk-scale dense linear algebra on HermiteBasisSpec
// truncations. Truncating a non-normal operator can distort both eigenvalues
// and resolvent norms, so every reported quantity carries a convergence flag
// from a recomputation with doubled levels, and consumers are expected to
// use only flagged entries.

#include <iosfwd>
#include <vector>

#include "qsl/hermite.hpp"
#include "qsl/symbol_models.hpp"

namespace qsl {

struct SpectrumResult {
  std::vector<Complex> values;   // sorted by (|z|, Re z, Im z)
  std::vector<bool> converged;   // moved < tol_eig under doubled levels
  double tol_eig = 0.0;
};

// The `count` eigenvalues of smallest modulus of op.matrix. Each is flagged
// converged when the nearest eigenvalue of the doubled-levels matrix lies
// within tol_eig. `count` is clamped to the matrix dimension.
SpectrumResult low_spectrum(const OperatorMatrix& op, int count,
                            double tol_eig = 1e-8);

// Smallest singular value.
double s_min(const CMat& M);

struct ResolventScan {
  std::vector<Complex> z_grid;
  std::vector<double> h_list;
  Mat values;                       // values(i, j) = s_min at (z_i, h_j)
  std::vector<std::vector<bool>> converged;  // same shape as values
  std::vector<bool> admissible;     // per z
  std::vector<double> c0_fit;       // per h: max over admissible converged z of h / s_min

  // CSV with columns z_re, z_im, h, s_min, s_min_over_h, converged, admissible.
  void write_csv(std::ostream& out) const;
};

// s_min(P - h z) over the grid, where P = (p0)^w + h (p1)^w at each h in
// h_list on the given basis (basis.h is ignored; h comes from h_list).
// Convergence per scan point compares against doubled levels. The region
// fills the admissibility mask; c0_fit uses only admissible converged points.
ResolventScan resolvent_scan(const PolynomialSymbol& p0, const PolynomialSymbol& p1,
                             const std::vector<Complex>& z_grid,
                             const std::vector<double>& h_list,
                             const HermiteBasisSpec& basis,
                             const AdmissibleRegion& region);

}  // namespace qsl
