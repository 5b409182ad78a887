#include "qsl/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>

#include "qsl/errors.hpp"

namespace qsl {

namespace {

[[noreturn]] void fail(const std::string& context, const std::string& what) {
  throw InputError(context + ": " + what);
}

void expect_object(const njson& j, const std::string& ctx) {
  if (!j.is_object()) fail(ctx, "expected an object");
}

// Strictness: every present field must be in the allowed list.
void reject_unknown(const njson& j, std::initializer_list<const char*> allowed,
                    const std::string& ctx) {
  for (const auto& [key, unused] : j.items()) {
    (void)unused;
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(ctx, "unknown field '" + key + "'");
  }
}

int get_int(const njson& j, const char* key, const std::string& ctx) {
  if (!j.contains(key)) fail(ctx, std::string("missing field '") + key + "'");
  const njson& v = j.at(key);
  if (!v.is_number_integer()) fail(ctx, std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

double get_num(const njson& j, const char* key, const std::string& ctx, double dflt,
               bool required = false) {
  if (!j.contains(key)) {
    if (required) fail(ctx, std::string("missing field '") + key + "'");
    return dflt;
  }
  const njson& v = j.at(key);
  if (!v.is_number()) fail(ctx, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::vector<int> get_int_array(const njson& v, const std::string& ctx) {
  if (!v.is_array()) fail(ctx, "expected an array of integers");
  std::vector<int> out;
  for (const njson& e : v) {
    if (!e.is_number_integer()) fail(ctx, "expected an array of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

PolynomialSymbol symbol_part_from_json(const njson& j, const std::string& ctx) {
  expect_object(j, ctx);
  reject_unknown(j, {"n", "terms"}, ctx);
  const int n = get_int(j, "n", ctx);
  if (n < 1) fail(ctx, "'n' must be at least 1");
  PolynomialSymbol p(n);
  if (!j.contains("terms")) fail(ctx, "missing field 'terms'");
  if (!j.at("terms").is_array()) fail(ctx, "'terms' must be an array");
  int idx = 0;
  for (const njson& t : j.at("terms")) {
    const std::string tctx = ctx + ".terms[" + std::to_string(idx++) + "]";
    expect_object(t, tctx);
    reject_unknown(t, {"alpha", "beta", "re", "im"}, tctx);
    if (!t.contains("alpha") || !t.contains("beta"))
      fail(tctx, "needs 'alpha' and 'beta' exponent arrays");
    const std::vector<int> alpha = get_int_array(t.at("alpha"), tctx + ".alpha");
    const std::vector<int> beta = get_int_array(t.at("beta"), tctx + ".beta");
    if (int(alpha.size()) != n || int(beta.size()) != n)
      fail(tctx, "exponent arrays must have length n");
    MultiIndex k(alpha);
    k.insert(k.end(), beta.begin(), beta.end());
    const Complex c(get_num(t, "re", tctx, 0.0), get_num(t, "im", tctx, 0.0));
    try {
      p.add_term(k, c);
    } catch (const InputError& e) {
      fail(tctx, e.what());
    }
  }
  return p;
}

}  // namespace

njson parse_json(const std::string& text, const std::string& context) {
  try {
    return njson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(context + ": " + e.what());
  }
}

njson load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path);
}

QuadraticForm quadratic_from_json(const njson& j) {
  const std::string ctx = "quadratic form";
  expect_object(j, ctx);
  reject_unknown(j, {"n", "coeffs"}, ctx);
  const int n = get_int(j, "n", ctx);
  if (n < 1) fail(ctx, "'n' must be at least 1");
  if (!j.contains("coeffs") || !j.at("coeffs").is_array())
    fail(ctx, "missing 'coeffs' array");
  CMat Q = CMat::Zero(2 * n, 2 * n);
  int idx = 0;
  for (const njson& t : j.at("coeffs")) {
    const std::string tctx = ctx + ".coeffs[" + std::to_string(idx++) + "]";
    expect_object(t, tctx);
    reject_unknown(t, {"mono", "re", "im"}, tctx);
    if (!t.contains("mono")) fail(tctx, "missing field 'mono'");
    const std::vector<int> k = get_int_array(t.at("mono"), tctx + ".mono");
    if (int(k.size()) != 2 * n) fail(tctx, "'mono' must have length 2n");
    int total = 0;
    std::vector<int> where;
    for (int i = 0; i < 2 * n; ++i) {
      if (k[i] < 0) fail(tctx, "negative exponent");
      total += k[i];
      for (int rep = 0; rep < k[i]; ++rep) where.push_back(i);
    }
    if (total != 2) fail(tctx, "'mono' must have total degree exactly 2");
    const Complex c(get_num(t, "re", tctx, 0.0), get_num(t, "im", tctx, 0.0));
    if (where[0] == where[1]) {
      Q(where[0], where[1]) += c;
    } else {
      Q(where[0], where[1]) += 0.5 * c;
      Q(where[1], where[0]) += 0.5 * c;
    }
  }
  return QuadraticForm(n, Q);
}

SymbolInput symbol_from_json(const njson& j) {
  const std::string ctx = "symbol";
  expect_object(j, ctx);
  reject_unknown(j, {"n", "terms", "subprincipal"}, ctx);
  njson principal = j;
  principal.erase("subprincipal");
  SymbolInput in{symbol_part_from_json(principal, ctx), PolynomialSymbol(1), false};
  if (j.contains("subprincipal")) {
    in.p1 = symbol_part_from_json(j.at("subprincipal"), ctx + ".subprincipal");
    in.has_subprincipal = true;
    if (in.p1.dim() != in.p0.dim())
      fail(ctx, "subprincipal part must live on the same phase space");
  } else {
    in.p1 = PolynomialSymbol(in.p0.dim() / 2);
  }
  return in;
}

ScanConfig scan_config_from_json(const njson& j) {
  const std::string ctx = "scan config";
  expect_object(j, ctx);
  reject_unknown(j, {"z_grid", "h", "levels"}, ctx);
  if (!j.contains("z_grid")) fail(ctx, "missing field 'z_grid'");
  const njson& zg = j.at("z_grid");
  expect_object(zg, ctx + ".z_grid");

  ScanConfig cfg;
  if (zg.contains("circle")) {
    reject_unknown(zg, {"circle"}, ctx + ".z_grid");
    const njson& c = zg.at("circle");
    const std::string cctx = ctx + ".z_grid.circle";
    expect_object(c, cctx);
    reject_unknown(c, {"center", "radius", "points"}, cctx);
    if (!c.contains("center") || !c.at("center").is_array() || c.at("center").size() != 2)
      fail(cctx, "'center' must be [re, im]");
    const Complex z0(c.at("center")[0].get<double>(), c.at("center")[1].get<double>());
    const double r = get_num(c, "radius", cctx, 0.0, true);
    const int m = get_int(c, "points", cctx);
    if (m < 1) fail(cctx, "empty grid: 'points' must be at least 1");
    for (int k = 0; k < m; ++k) {
      const double th = 2.0 * M_PI * k / m;
      cfg.z_grid.push_back(z0 + r * Complex(std::cos(th), std::sin(th)));
    }
  } else {
    reject_unknown(zg, {"re", "im"}, ctx + ".z_grid");
    auto axis = [&](const char* key) {
      if (!zg.contains(key)) fail(ctx + ".z_grid", std::string("missing field '") + key + "'");
      const njson& a = zg.at(key);
      if (!a.is_array() || a.size() != 3)
        fail(ctx + ".z_grid", std::string("'") + key + "' must be [min, max, steps]");
      const double lo = a[0].get<double>(), hi = a[1].get<double>();
      const int steps = a[2].get<int>();
      if (steps < 1) fail(ctx + ".z_grid", "empty grid: steps must be at least 1");
      std::vector<double> vals;
      for (int i = 0; i < steps; ++i)
        vals.push_back(steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1));
      return vals;
    };
    for (double re : axis("re"))
      for (double im : axis("im")) cfg.z_grid.push_back(Complex(re, im));
  }

  if (j.contains("h")) {
    if (!j.at("h").is_array()) fail(ctx, "'h' must be an array");
    for (const njson& e : j.at("h")) {
      if (!e.is_number()) fail(ctx, "'h' must be an array of numbers");
      cfg.h.push_back(e.get<double>());
    }
  }
  if (j.contains("levels")) cfg.levels = get_int(j, "levels", ctx);
  return cfg;
}

Prop1Config prop1_config_from_json(const njson& j) {
  const std::string ctx = "certification config";
  expect_object(j, ctx);
  reject_unknown(j, {"epsilon", "delta", "T", "grid"}, ctx);
  Prop1Config cfg;
  cfg.epsilon = get_num(j, "epsilon", ctx, 0.0, true);
  cfg.delta = get_num(j, "delta", ctx, 0.0, true);
  cfg.T = get_num(j, "T", ctx, 0.0, true);
  if (j.contains("grid")) {
    const njson& g = j.at("grid");
    const std::string gctx = ctx + ".grid";
    expect_object(g, gctx);
    reject_unknown(g, {"radii", "angular"}, gctx);
    cfg.has_grid = true;
    if (g.contains("radii")) {
      if (!g.at("radii").is_array()) fail(gctx, "'radii' must be an array");
      for (const njson& e : g.at("radii")) cfg.grid.radii.push_back(e.get<double>());
    }
    if (g.contains("angular")) cfg.grid.angular = get_int(g, "angular", gctx);
  }
  return cfg;
}

njson json_of_complex(Complex z) { return njson{{"re", z.real()}, {"im", z.imag()}}; }

njson json_of_vec(const Vec& v) {
  njson a = njson::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

njson json_of_mat(const Mat& m) {
  njson rows = njson::array();
  for (int i = 0; i < m.rows(); ++i) {
    njson row = njson::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

njson json_of_cmat(const CMat& m) {
  return njson{{"re", json_of_mat(m.real())}, {"im", json_of_mat(m.imag())}};
}

namespace {

void emit(const njson& j, std::ostream& out, int depth) {
  const std::string pad(2 * size_t(depth), ' ');
  const std::string pad1(2 * size_t(depth + 1), ' ');
  switch (j.type()) {
    case njson::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (const auto& [key, val] : j.items()) {
        if (!first) out << ",\n";
        first = false;
        out << pad1 << njson(key).dump() << ": ";
        emit(val, out, depth + 1);
      }
      out << "\n" << pad << "}";
      return;
    }
    case njson::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << "[\n";
      bool first = true;
      for (const njson& e : j) {
        if (!first) out << ",\n";
        first = false;
        out << pad1;
        emit(e, out, depth + 1);
      }
      out << "\n" << pad << "]";
      return;
    }
    case njson::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out << "null";
        return;
      }
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out << buf;
      return;
    }
    default:
      out << j.dump();  // ints, bools, strings, null
      return;
  }
}

}  // namespace

void write_json(const njson& j, std::ostream& out) {
  emit(j, out, 0);
  out << "\n";
}

std::string json_string(const njson& j) {
  std::ostringstream out;
  write_json(j, out);
  return out.str();
}

}  // namespace qsl
