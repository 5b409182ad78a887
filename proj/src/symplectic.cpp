#include "qsl/symplectic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace qsl {

namespace {

// Orthonormal kernel basis of a real matrix, with a decade-wide guard band
// around the rank threshold: a singular value within a factor 10 of
// tol * sigma_max means the dimension decision is not trustworthy.
Mat null_space(const Mat& A, double tol, const char* what) {
  const int k = static_cast<int>(A.cols());
  if (A.rows() == 0 || A.norm() == 0.0) return Mat::Identity(k, k);
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s[0];
  if (smax == 0.0) return Mat::Identity(k, k);
  const double thr = tol * smax;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s[i] > thr) ++rank;
    if (s[i] > thr / 10.0 && s[i] < thr * 10.0) {
      std::ostringstream os;
      os << what << ": singular value " << s[i] << " lies in the guard band ("
         << thr / 10.0 << ", " << thr * 10.0 << ") around the rank threshold";
      throw RankAmbiguity(os.str());
    }
  }
  return svd.matrixV().rightCols(k - rank);
}

// Complex analogue, used for eigenvector kernels Ker(F - lambda).
CMat null_space_c(const CMat& A, double tol) {
  const int k = static_cast<int>(A.cols());
  Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  if (smax == 0.0) return CMat::Identity(k, k);
  const double thr = tol * smax;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > thr) ++rank;
  return svd.matrixV().rightCols(k - rank);
}

// Real points of the complex span of B: solve (I - B B^H) X = 0 over R by
// stacking real and imaginary parts.
Mat real_points(const CMat& B, double tol) {
  const int dim = static_cast<int>(B.rows());
  const CMat P = CMat::Identity(dim, dim) - B * B.adjoint();
  Mat stacked(2 * dim, dim);
  stacked.topRows(dim) = P.real();
  stacked.bottomRows(dim) = P.imag();
  return null_space(stacked, tol, "real_points");
}

struct Cluster {
  Complex rep;
  int mult = 0;
  std::vector<int> members;
};

// Single-linkage clustering of eigenvalues at the given radius.
std::vector<Cluster> cluster_eigenvalues(const CVec& ev, double radius) {
  const int m = static_cast<int>(ev.size());
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (std::abs(ev[i] - ev[j]) <= radius) parent[find(i)] = find(j);

  std::vector<Cluster> out;
  std::vector<int> root_slot(m, -1);
  for (int i = 0; i < m; ++i) {
    const int r = find(i);
    if (root_slot[r] < 0) {
      root_slot[r] = static_cast<int>(out.size());
      out.push_back({});
    }
    Cluster& c = out[root_slot[r]];
    c.members.push_back(i);
    c.mult += 1;
  }
  for (auto& c : out) {
    Complex sum{0.0, 0.0};
    for (int i : c.members) sum += ev[i];
    c.rep = sum / static_cast<double>(c.mult);
  }
  // Deterministic order: by (Re, Im) of the representative.
  std::sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) {
    if (a.rep.real() != b.rep.real()) return a.rep.real() < b.rep.real();
    return a.rep.imag() < b.rep.imag();
  });
  return out;
}

// Guard: distinct clusters whose closest members sit within a decade of the
// clustering radius make multiplicities ambiguous.
void check_cluster_separation(const CVec& ev, const std::vector<Cluster>& cl,
                              double radius) {
  for (size_t a = 0; a < cl.size(); ++a)
    for (size_t b = a + 1; b < cl.size(); ++b)
      for (int i : cl[a].members)
        for (int j : cl[b].members) {
          const double d = std::abs(ev[i] - ev[j]);
          if (d < 10.0 * radius) {
            std::ostringstream os;
            os << "eigenvalue clusters overlap: gap " << d
               << " is within a decade of the clustering radius " << radius;
            throw ClusterAmbiguity(os.str());
          }
        }
}

// Symplectic Gram-Schmidt on the column span of B (assumed sigma-nondegenerate
// and even-dimensional). Returns (U, V) with sigma(u_i, u_j) = sigma(v_i, v_j)
// = 0 and sigma(u_i, v_j) = -delta_ij, matching the standard matrix: new
// coordinates (x, xi) with X = sum x_i u_i + xi_i v_i are symplectic.
std::pair<Mat, Mat> symplectic_gram_schmidt(const Mat& B, double tol) {
  const int dim = static_cast<int>(B.rows());
  const Mat S = sigma_matrix(dim / 2);
  Mat W = B;
  const int pairs = static_cast<int>(B.cols()) / 2;
  if (B.cols() % 2 != 0)
    throw RankAmbiguity("symplectic_gram_schmidt: odd-dimensional subspace");
  Mat U(dim, pairs), V(dim, pairs);
  for (int p = 0; p < pairs; ++p) {
    Vec u = W.col(0).normalized();
    // Partner with the largest pairing against u.
    int best = -1;
    double best_abs = 0.0;
    for (int j = 1; j < W.cols(); ++j) {
      const double s = u.dot(S * W.col(j));
      if (std::abs(s) > best_abs) {
        best_abs = std::abs(s);
        best = j;
      }
    }
    if (best < 0 || best_abs <= tol)
      throw RankAmbiguity("symplectic_gram_schmidt: sigma degenerate on subspace");
    const double s = u.dot(S * W.col(best));
    Vec v = -W.col(best) / s;  // sigma(u, v) = -1
    U.col(p) = u;
    V.col(p) = v;
    if (p + 1 == pairs) break;
    // Project the rest onto the sigma-complement of span(u, v):
    // w -> w + sigma(w, v) u - sigma(w, u) v.
    Mat next(dim, W.cols() - 2);
    int col = 0;
    for (int j = 1; j < W.cols(); ++j) {
      if (j == best) continue;
      const Vec& w = W.col(j);
      const double swv = w.dot(S * v);
      const double swu = w.dot(S * u);
      next.col(col++) = w + swv * u - swu * v;
    }
    // Re-orthonormalize to keep the column count honest.
    Eigen::ColPivHouseholderQR<Mat> qr(next);
    qr.setThreshold(1e-10);
    const int rank = static_cast<int>(qr.rank());
    if (rank < next.cols())
      throw RankAmbiguity("symplectic_gram_schmidt: projected basis lost rank");
    W = qr.householderQ() * Mat::Identity(dim, rank);
  }
  return {U, V};
}

}  // namespace

SingularSpace singular_space(const HamiltonMap& F, double tol, int j_max) {
  const int dim = static_cast<int>(F.rows());
  if (j_max < 0) j_max = dim - 1;
  const Mat S = sigma_matrix(dim / 2);
  const Mat reF = F.real();
  const Mat imF = F.imag();

  // Stack Re F (Im F)^j, each block normalized so no single power dominates
  // the SVD. Blocks that vanish to roundoff (relative to the growth bound
  // ||Re F|| ||Im F||^j) constrain nothing and are skipped.
  std::vector<Mat> blocks;
  Mat P = Mat::Identity(dim, dim);  // (Im F)^j
  const double nrm_re = reF.norm();
  const double nrm_im = std::max(1.0, imF.norm());
  for (int j = 0; j <= j_max; ++j) {
    Mat blk = reF * P;
    const double bound = nrm_re * std::pow(nrm_im, j);
    if (blk.norm() > 1e-13 * std::max(bound, 1.0))
      blocks.push_back(blk / blk.norm());
    P = imF * P;
  }

  SingularSpace out;
  if (blocks.empty()) {
    out.basis = Mat::Identity(dim, dim);
    out.basis_perp = Mat(dim, 0);
    return out;
  }
  Mat stacked(static_cast<int>(blocks.size()) * dim, dim);
  for (size_t b = 0; b < blocks.size(); ++b)
    stacked.middleRows(static_cast<int>(b) * dim, dim) = blocks[b];
  out.basis = null_space(stacked, tol, "singular_space");

  // S^{sigma-perp} = Ker(B_S^T Sigma); full phase space when S = {0}.
  if (out.dim() == 0)
    out.basis_perp = Mat::Identity(dim, dim);
  else
    out.basis_perp = null_space(out.basis.transpose() * S, tol, "singular_space(perp)");
  return out;
}

SingularSpace singular_space(const QuadraticForm& q, double tol, int j_max) {
  return singular_space(hamilton_map(q), tol, j_max);
}

std::vector<RealEigenSpace> real_eigen_splitting(const HamiltonMap& F, double tol) {
  const int dim = static_cast<int>(F.rows());
  const SingularSpace sing = singular_space(F);

  Eigen::ComplexEigenSolver<CMat> es(F, false);
  const CVec ev = es.eigenvalues();
  const double radius = tol * std::max(1.0, F.norm());
  const auto clusters = cluster_eigenvalues(ev, radius);

  std::vector<RealEigenSpace> out;
  int total_dim = 0;
  Mat all(dim, 0);
  for (const auto& c : clusters) {
    if (std::abs(c.rep.imag()) > radius) continue;  // not real
    const double lam = c.rep.real();
    if (lam <= radius) continue;  // zero cluster or the negative partner
    // The pair -lambda must be present.
    const bool paired = std::any_of(clusters.begin(), clusters.end(), [&](const Cluster& d) {
      return std::abs(d.rep.imag()) <= radius && std::abs(d.rep.real() + lam) <= 10.0 * radius;
    });
    if (!paired) {
      std::ostringstream os;
      os << "real eigenvalue " << lam << " of the Hamilton map has no -lambda partner";
      throw SplittingMismatch(os.str());
    }
    const CMat Kp = null_space_c(F - lam * CMat::Identity(dim, dim), 1e-10);
    const CMat Km = null_space_c(F + lam * CMat::Identity(dim, dim), 1e-10);
    CMat both(dim, Kp.cols() + Km.cols());
    both << Kp, Km;
    Eigen::HouseholderQR<CMat> qr(both);
    const CMat Borth = qr.householderQ() * CMat::Identity(dim, both.cols());
    RealEigenSpace space;
    space.lambda = lam;
    space.basis = real_points(Borth, 1e-10);
    total_dim += static_cast<int>(space.basis.cols());
    Mat grown(dim, all.cols() + space.basis.cols());
    grown << all, space.basis;
    all = grown;
    out.push_back(std::move(space));
  }

  // Cross-check: the pair spaces must tile the singular space.
  if (total_dim != sing.dim()) {
    std::ostringstream os;
    os << "eigenvalue-pair spaces span dimension " << total_dim
       << " but the singular space has dimension " << sing.dim();
    throw SplittingMismatch(os.str());
  }
  if (total_dim > 0) {
    const Mat resid = all - sing.basis * (sing.basis.transpose() * all);
    if (resid.norm() > 1e-8 * std::max(1.0, all.norm()))
      throw SplittingMismatch("eigenvalue-pair spaces leak outside the singular space");
  }
  std::sort(out.begin(), out.end(),
            [](const RealEigenSpace& a, const RealEigenSpace& b) { return a.lambda < b.lambda; });
  return out;
}

PartialEllipticity is_elliptic_on_singular_space(const QuadraticForm& q,
                                                 const SingularSpace& S_in, double tol) {
  PartialEllipticity out;
  out.space = S_in;
  const int k = out.space.dim();
  if (k == 0) {
    out.elliptic = true;  // vacuously: nothing to restrict to
    return out;
  }
  const Mat& B = out.space.basis;
  Mat A = B.transpose() * q.im() * B;
  A = (0.5 * (A + A.transpose())).eval();
  const double scale = std::max(1.0, A.norm());
  const double thr = tol * scale;
  Eigen::SelfAdjointEigenSolver<Mat> es(A);
  const Vec eig = es.eigenvalues();
  const double lo = eig.minCoeff(), hi = eig.maxCoeff();

  if (std::max(std::abs(lo), std::abs(hi)) <= thr) {
    out.vanishes = true;  // q restricted to S is identically zero
    return out;
  }
  int eps0;
  if (lo > thr)
    eps0 = +1;
  else if (hi < -thr)
    eps0 = -1;
  else {
    std::ostringstream os;
    os << "Im q restricted to the singular space is not definite "
       << "(eigenvalue range [" << lo << ", " << hi << "])";
    throw IndefiniteButNonzero(os.str());
  }

  // Symplectic eigenvalues of eps0 * Im q|_S against sigma|_S: eigenvalues of
  // J_S^{-1} (eps0 A) are +- i lambda_j.
  const Mat S = sigma_matrix(q.n);
  const Mat Js = B.transpose() * S * B;
  Eigen::JacobiSVD<Mat> jsvd(Js);
  if (jsvd.singularValues().minCoeff() <= tol * std::max(1.0, jsvd.singularValues().maxCoeff()))
    throw RankAmbiguity("restricted symplectic form is numerically degenerate");
  const Mat K = Js.partialPivLu().solve(static_cast<double>(eps0) * A);
  Eigen::EigenSolver<Mat> kes(K, false);
  std::vector<double> lams;
  for (int i = 0; i < kes.eigenvalues().size(); ++i) {
    const double im = kes.eigenvalues()[i].imag();
    if (im > 0.0) lams.push_back(im);
  }
  if (static_cast<int>(lams.size()) != k / 2)
    throw RankAmbiguity("symplectic eigenvalue count mismatch on the singular space");
  std::sort(lams.begin(), lams.end());

  WilliamsonData w;
  w.eps0 = eps0;
  w.lambda = Eigen::Map<Vec>(lams.data(), static_cast<int>(lams.size()));
  out.elliptic = true;
  out.williamson = std::move(w);
  return out;
}

PartialEllipticity is_elliptic_on_singular_space(const QuadraticForm& q, double tol) {
  return is_elliptic_on_singular_space(q, singular_space(q, tol), tol);
}

WilliamsonReduction williamson_reduce(const Mat& M, double tol) {
  const int k = static_cast<int>(M.rows());
  if (k % 2 != 0) throw RankAmbiguity("williamson_reduce: odd dimension");
  const int m = k / 2;
  const Mat J0 = sigma_matrix(m);

  Eigen::SelfAdjointEigenSolver<Mat> es(M);
  if (es.eigenvalues().minCoeff() <= tol * std::max(1.0, es.eigenvalues().maxCoeff()))
    throw RankAmbiguity("williamson_reduce: matrix is not positive definite");
  const Mat Mi = es.operatorInverseSqrt();

  // L = M^{-1/2} J0 M^{-1/2} is skew; its real Schur form is block diagonal
  // with blocks [[0, b], [-b, 0]], and the symplectic eigenvalues are 1/|b|.
  const Mat L = Mi * J0 * Mi;
  Eigen::RealSchur<Mat> schur(L);
  const Mat& T = schur.matrixT();
  const Mat& Uo = schur.matrixU();

  struct Pair {
    Vec u, v;
    double nu;
  };
  std::vector<Pair> pairs;
  for (int i = 0; i < k;) {
    if (i + 1 >= k || std::abs(T(i + 1, i)) <= 1e-12)
      throw RankAmbiguity("williamson_reduce: degenerate symplectic spectrum");
    const double b = T(i, i + 1);
    const Vec p = Uo.col(i), qv = Uo.col(i + 1);
    // L p = -b q, L q = b p; orient so that L u = nu v with nu > 0.
    if (b > 0.0)
      pairs.push_back({qv, p, b});
    else
      pairs.push_back({p, qv, -b});
    i += 2;
  }
  // lambda = 1/nu ascending <=> nu descending.
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.nu > b.nu; });

  Mat T_out(k, k);
  Vec lambda(m);
  for (int j = 0; j < m; ++j) {
    const double s = 1.0 / std::sqrt(pairs[j].nu);
    T_out.col(j) = Mi * pairs[j].u * s;
    T_out.col(m + j) = Mi * pairs[j].v * s;
    lambda[j] = 1.0 / pairs[j].nu;
  }

  // Verification: symplectic and diagonalizing.
  if ((T_out.transpose() * J0 * T_out - J0).norm() > 1e-8 * std::max(1.0, T_out.squaredNorm()))
    throw SplittingMismatch("williamson_reduce: output basis is not symplectic");
  Mat D = Mat::Zero(k, k);
  D.topLeftCorner(m, m) = lambda.asDiagonal();
  D.bottomRightCorner(m, m) = lambda.asDiagonal();
  if ((T_out.transpose() * M * T_out - D).norm() > 1e-8 * std::max(1.0, M.norm()))
    throw SplittingMismatch("williamson_reduce: output fails to diagonalize the form");
  return {T_out, lambda};
}

SymplecticSplitting symplectic_splitting(const QuadraticForm& q, const SingularSpace& S_in,
                                         double tol) {
  PartialEllipticity pe = is_elliptic_on_singular_space(q, S_in, tol);
  if (!pe.elliptic)
    throw NotPartiallyElliptic(
        "q vanishes identically on its singular space; no Williamson block exists");
  const int dim = 2 * q.n;
  const int k = pe.space.dim();

  SymplecticSplitting out;
  out.n_sing = k / 2;
  out.n_perp = q.n - out.n_sing;
  out.williamson.eps0 = pe.williamson ? pe.williamson->eps0 : 0;

  if (k == 0) {
    out.C = Mat::Identity(dim, dim);
    out.Q_split = q.Q;
    out.williamson.lambda = Vec(0);
    return out;
  }

  Mat Up(dim, 0), Vp(dim, 0);
  if (out.n_perp > 0) {
    auto [U, V] = symplectic_gram_schmidt(pe.space.basis_perp, tol);
    Up = U;
    Vp = V;
  }

  // Symplectic basis of S, then Williamson normalization of eps0 Im q|_S.
  auto [Us, Vs] = symplectic_gram_schmidt(pe.space.basis, tol);
  Mat Bs(dim, k);
  Bs << Us, Vs;
  const double eps0 = static_cast<double>(out.williamson.eps0);
  Mat Ms = eps0 * (Bs.transpose() * q.im() * Bs);
  Ms = (0.5 * (Ms + Ms.transpose())).eval();
  WilliamsonReduction wr = williamson_reduce(Ms);
  const Mat Bw = Bs * wr.T;
  out.williamson.lambda = wr.lambda;

  out.C = Mat(dim, dim);
  out.C << Up, Bw.leftCols(out.n_sing), Vp, Bw.rightCols(out.n_sing);
  if (symplectic_defect(out.C.cast<Complex>()) > 1e-8 * std::max(1.0, out.C.squaredNorm()))
    throw NotSymplectic("symplectic_splitting: assembled basis lost symplecticity");

  const CMat Cc = out.C.cast<Complex>();
  out.Q_split = Cc.transpose() * q.Q * Cc;

  // Cross blocks between (x', xi') and (x'', xi'') must vanish.
  std::vector<int> idx_perp, idx_sing;
  for (int i = 0; i < out.n_perp; ++i) {
    idx_perp.push_back(i);
    idx_perp.push_back(q.n + i);
  }
  for (int i = 0; i < out.n_sing; ++i) {
    idx_sing.push_back(out.n_perp + i);
    idx_sing.push_back(q.n + out.n_perp + i);
  }
  double cross = 0.0;
  for (int a : idx_perp)
    for (int b : idx_sing) cross = std::max(cross, std::abs(out.Q_split(a, b)));
  const double qscale = std::max(1.0, q.Q.norm());
  out.cross_residual = cross / qscale;
  if (out.cross_residual > std::max(tol * 100.0, 1e-9))
    throw SplittingMismatch("symplectic_splitting: cross blocks fail to vanish");

  // The S block must be i eps0 diag(lambda, lambda).
  CMat want = CMat::Zero(k, k);
  for (int j = 0; j < out.n_sing; ++j) {
    want(j, j) = Complex(0.0, eps0 * wr.lambda[j]);
    want(out.n_sing + j, out.n_sing + j) = Complex(0.0, eps0 * wr.lambda[j]);
  }
  CMat got(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) got(a, b) = out.Q_split(idx_sing[a], idx_sing[b]);
  if ((got - want).norm() > std::max(tol * 100.0, 1e-9) * qscale)
    throw SplittingMismatch("symplectic_splitting: singular-space block not in normal form");
  return out;
}

SymplecticSplitting symplectic_splitting(const QuadraticForm& q, double tol) {
  return symplectic_splitting(q, singular_space(q, tol), tol);
}

double SpectrumLattice::distance(Complex z) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points) best = std::min(best, std::abs(z - p.value));
  return best;
}

SpectrumLattice quadratic_spectrum(const QuadraticForm& q, double radius, double tol) {
  PartialEllipticity pe = is_elliptic_on_singular_space(q);
  if (!pe.elliptic)
    throw EllipticityRequired(
        "quadratic_spectrum requires partial ellipticity; q vanishes on its singular space");
  const int eps0 = pe.williamson ? pe.williamson->eps0 : 0;

  const HamiltonMap F = hamilton_map(q);
  Eigen::ComplexEigenSolver<CMat> es(F, false);
  const CVec ev = es.eigenvalues();
  const double rc = std::max(tol, 1e-14) * std::max(1.0, F.norm());
  const auto clusters = cluster_eigenvalues(ev, rc);
  check_cluster_separation(ev, clusters, rc);

  SpectrumLattice lat;
  lat.radius = radius;
  std::vector<bool> axis_flag;
  for (const auto& c : clusters) {
    if (std::abs(c.rep) <= rc) continue;  // zero eigenvalue contributes nothing
    if (c.rep.imag() > rc) {
      // -i lambda lands in the open right half plane.
      lat.generators.push_back({Complex(c.rep.imag(), -c.rep.real()), c.mult});
      axis_flag.push_back(false);
    } else if (std::abs(c.rep.imag()) <= rc && eps0 != 0) {
      // Real eigenvalue pair: selected sign is -eps0, giving mu on i eps0 (0, inf).
      const double lam = c.rep.real();
      if ((lam < 0.0) == (eps0 > 0)) {
        lat.generators.push_back({Complex(0.0, -lam), c.mult});
        axis_flag.push_back(true);
      }
    }
  }
  // Sort generators with their axis flags attached.
  {
    std::vector<size_t> order(lat.generators.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      const Complex& ma = lat.generators[a].mu;
      const Complex& mb = lat.generators[b].mu;
      if (ma.real() != mb.real()) return ma.real() < mb.real();
      return ma.imag() < mb.imag();
    });
    std::vector<SpectrumGenerator> g;
    std::vector<bool> f;
    for (size_t i : order) {
      g.push_back(lat.generators[i]);
      f.push_back(axis_flag[i]);
    }
    lat.generators = std::move(g);
    axis_flag = std::move(f);
  }

  lat.ground = Complex(0.0, 0.0);
  for (const auto& g : lat.generators) lat.ground += static_cast<double>(g.r) * g.mu;

  // Enumerate ground + 2 sum k_l mu_l inside |value| <= radius. Half-plane
  // generators only increase the real part; axis generators move the
  // imaginary part monotonically in the direction eps0.
  const double R_eff = radius * (1.0 + 1e-12) + 1e-12;
  std::vector<int> half_idx, axis_idx;
  for (size_t i = 0; i < lat.generators.size(); ++i)
    (axis_flag[i] ? axis_idx : half_idx).push_back(static_cast<int>(i));

  std::vector<int> kvec(lat.generators.size(), 0);
  const size_t hard_cap = 2'000'000;
  size_t nodes = 0;
  const auto count_node = [&nodes]() {
    if (++nodes > 50'000'000)
      throw Error("quadratic_spectrum: lattice enumeration budget exhausted");
  };

  std::function<void(size_t, Complex)> enum_axis = [&](size_t pos, Complex v) {
    count_node();
    if (pos == axis_idx.size()) {
      if (std::abs(v) <= R_eff) {
        lat.points.push_back({v, kvec});
        if (lat.points.size() > hard_cap)
          throw Error("quadratic_spectrum: lattice enumeration exceeded 2e6 points");
      }
      return;
    }
    const int gi = axis_idx[pos];
    const Complex mu = lat.generators[gi].mu;
    const double s = (mu.imag() > 0.0) ? 1.0 : -1.0;
    for (int k = 0;; ++k) {
      const Complex val = v + 2.0 * k * mu;
      if (s * val.imag() > R_eff) break;
      kvec[gi] = k;
      enum_axis(pos + 1, val);
    }
    kvec[gi] = 0;
  };

  std::function<void(size_t, Complex)> enum_half = [&](size_t pos, Complex v) {
    count_node();
    if (v.real() > R_eff) return;
    if (pos == half_idx.size()) {
      enum_axis(0, v);
      return;
    }
    const int gi = half_idx[pos];
    const Complex mu = lat.generators[gi].mu;
    for (int k = 0;; ++k) {
      const Complex val = v + 2.0 * k * mu;
      if (val.real() > R_eff) break;
      kvec[gi] = k;
      enum_half(pos + 1, val);
    }
    kvec[gi] = 0;
  };

  if (!lat.generators.empty()) enum_half(0, lat.ground);

  std::sort(lat.points.begin(), lat.points.end(),
            [](const SpectrumLattice::Point& a, const SpectrumLattice::Point& b) {
              const double ma = std::abs(a.value), mb = std::abs(b.value);
              if (ma != mb) return ma < mb;
              return a.k < b.k;
            });
  return lat;
}

QuadraticForm lct_pushforward(const QuadraticForm& q, const SymplecticMatrix& C, double tol) {
  if (C.rows() != 2 * q.n || C.cols() != 2 * q.n)
    throw InputError("lct_pushforward: transformation has wrong size");
  const double defect = symplectic_defect(C);
  if (defect > tol * std::max(1.0, C.squaredNorm())) {
    std::ostringstream os;
    os << "transformation is not symplectic: || C^T S C - S || = " << defect;
    throw NotSymplectic(os.str());
  }
  const CMat Ci = C.partialPivLu().solve(CMat::Identity(C.rows(), C.cols()));
  return QuadraticForm(q.n, CMat(Ci.transpose() * q.Q * Ci));
}

SymplecticMatrix kappa_t(int n) {
  CMat C = CMat::Identity(2 * n, 2 * n);
  C.topRightCorner(n, n) = Complex(0.0, -1.0) * CMat::Identity(n, n);
  return C;
}

}  // namespace qsl
