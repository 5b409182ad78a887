#include "qsl/polynomial.hpp"

#include <numeric>
#include <sstream>

#include "qsl/errors.hpp"

namespace qsl {

namespace {

int total_degree(const MultiIndex& k) {
  return std::accumulate(k.begin(), k.end(), 0);
}

// X^k with one entry of k lowered; pass drop = -1 for X^k itself. Integer
// powers by repeated multiplication (degrees are tiny).
Complex monomial_at(const CVec& X, const MultiIndex& k, int drop_i = -1,
                    int drop_j = -1) {
  Complex prod(1.0, 0.0);
  for (int j = 0; j < static_cast<int>(k.size()); ++j) {
    int e = k[j] - (j == drop_i) - (j == drop_j);
    for (int r = 0; r < e; ++r) prod *= X[j];
  }
  return prod;
}

}  // namespace

PolynomialSymbol::PolynomialSymbol(int n_, int max_degree_)
    : n(n_), max_degree(max_degree_) {
  if (n < 1) throw InputError("polynomial symbol needs n >= 1");
  if (max_degree < 0) throw InputError("polynomial degree cap must be >= 0");
}

int PolynomialSymbol::degree() const {
  int d = 0;
  for (const auto& [k, c] : coeffs) d = std::max(d, total_degree(k));
  return d;
}

PolynomialSymbol& PolynomialSymbol::add_term(const MultiIndex& k, Complex c) {
  if (static_cast<int>(k.size()) != 2 * n) {
    std::ostringstream os;
    os << "exponent vector has size " << k.size() << ", expected " << 2 * n;
    throw InputError(os.str());
  }
  for (int e : k)
    if (e < 0) throw InputError("negative exponent in polynomial term");
  const int d = total_degree(k);
  if (d > max_degree) {
    std::ostringstream os;
    os << "term of degree " << d << " exceeds the cap " << max_degree;
    throw InputError(os.str());
  }
  auto it = coeffs.find(k);
  if (it == coeffs.end()) {
    if (c != Complex(0, 0)) coeffs.emplace(k, c);
  } else {
    it->second += c;
    if (it->second == Complex(0, 0)) coeffs.erase(it);
  }
  return *this;
}

Complex PolynomialSymbol::operator()(const CVec& X) const {
  if (static_cast<int>(X.size()) != 2 * n)
    throw InputError("argument dimension does not match the symbol");
  Complex acc(0, 0);
  for (const auto& [k, c] : coeffs) acc += c * monomial_at(X, k);
  return acc;
}

Complex PolynomialSymbol::operator()(const Vec& X) const {
  return (*this)(CVec(X.cast<Complex>()));
}

CVec PolynomialSymbol::gradient(const CVec& X) const {
  if (static_cast<int>(X.size()) != 2 * n)
    throw InputError("argument dimension does not match the symbol");
  CVec g = CVec::Zero(2 * n);
  for (const auto& [k, c] : coeffs)
    for (int j = 0; j < 2 * n; ++j)
      if (k[j] > 0) g[j] += c * static_cast<double>(k[j]) * monomial_at(X, k, j);
  return g;
}

CMat PolynomialSymbol::hessian(const CVec& X) const {
  if (static_cast<int>(X.size()) != 2 * n)
    throw InputError("argument dimension does not match the symbol");
  CMat H = CMat::Zero(2 * n, 2 * n);
  for (const auto& [k, c] : coeffs)
    for (int i = 0; i < 2 * n; ++i) {
      if (k[i] == 0) continue;
      for (int j = i; j < 2 * n; ++j) {
        const int mult = k[i] * (k[j] - (i == j));
        if (mult == 0) continue;
        const Complex v = c * static_cast<double>(mult) * monomial_at(X, k, i, j);
        H(i, j) += v;
        if (i != j) H(j, i) += v;
      }
    }
  return H;
}

PolynomialSymbol PolynomialSymbol::derivative(int j) const {
  if (j < 0 || j >= 2 * n) throw InputError("derivative index out of range");
  PolynomialSymbol d(n, max_degree);
  for (const auto& [k, c] : coeffs) {
    if (k[j] == 0) continue;
    MultiIndex ks = k;
    ks[j] -= 1;
    d.add_term(ks, c * static_cast<double>(k[j]));
  }
  return d;
}

namespace {

void check_same_space(const PolynomialSymbol& a, const PolynomialSymbol& b) {
  if (a.n != b.n)
    throw InputError("polynomial symbols live on different phase spaces");
}

}  // namespace

PolynomialSymbol operator+(const PolynomialSymbol& a, const PolynomialSymbol& b) {
  check_same_space(a, b);
  PolynomialSymbol s(a.n, std::max(a.max_degree, b.max_degree));
  s.coeffs = a.coeffs;
  for (const auto& [k, c] : b.coeffs) s.add_term(k, c);
  return s;
}

PolynomialSymbol operator-(const PolynomialSymbol& a, const PolynomialSymbol& b) {
  return a + (-b);
}

PolynomialSymbol operator-(const PolynomialSymbol& a) {
  PolynomialSymbol s = a;
  for (auto& [k, c] : s.coeffs) c = -c;
  return s;
}

PolynomialSymbol operator*(const PolynomialSymbol& a, const PolynomialSymbol& b) {
  check_same_space(a, b);
  PolynomialSymbol s(a.n, std::max(a.max_degree, b.max_degree));
  for (const auto& [ka, ca] : a.coeffs)
    for (const auto& [kb, cb] : b.coeffs) {
      MultiIndex k(2 * a.n);
      for (int j = 0; j < 2 * a.n; ++j) k[j] = ka[j] + kb[j];
      s.add_term(k, ca * cb);
    }
  return s;
}

PolynomialSymbol operator*(Complex c, const PolynomialSymbol& p) {
  PolynomialSymbol s(p.n, p.max_degree);
  if (c == Complex(0, 0)) return s;
  s.coeffs = p.coeffs;
  for (auto& [k, v] : s.coeffs) v *= c;
  return s;
}

PolynomialSymbol poly_constant(int n, Complex c) {
  PolynomialSymbol p(n);
  p.add_term(MultiIndex(2 * n, 0), c);
  return p;
}

PolynomialSymbol poly_coordinate(int n, int j) {
  if (j < 0 || j >= 2 * n) throw InputError("coordinate index out of range");
  PolynomialSymbol p(n);
  MultiIndex k(2 * n, 0);
  k[j] = 1;
  p.add_term(k, Complex(1, 0));
  return p;
}

PolynomialSymbol poly_from_quadratic(const QuadraticForm& q) {
  PolynomialSymbol p(q.n);
  const int d = 2 * q.n;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const Complex c = (i == j) ? q.Q(i, i) : q.Q(i, j) + q.Q(j, i);
      if (c == Complex(0, 0)) continue;
      MultiIndex k(d, 0);
      k[i] += 1;
      k[j] += 1;
      p.add_term(k, c);
    }
  return p;
}

}  // namespace qsl
