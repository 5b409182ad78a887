#pragma once

// Strict JSON ingestion for forms, symbols, and run configs, plus a
// deterministic emitter.
//
// Parsing is strict: unknown fields are rejected with the offending name and
// context, wrong types carry the field path. Emission fixes floating-point
// formatting at 17 significant digits so identical configs produce
// byte-identical reports; non-finite values emit as null.

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

#include "qsl/polynomial.hpp"
#include "qsl/quadratic.hpp"
#include "qsl/weight_builder.hpp"

namespace qsl {

using njson = nlohmann::ordered_json;

// Parse a file; InputError carries the parser's position diagnostics.
njson load_json_file(const std::string& path);
njson parse_json(const std::string& text, const std::string& context);

// {"n": int, "coeffs": [{"mono": [2n exponents, total degree 2],
//  "re": float, "im": float}]}; re/im default to 0.
QuadraticForm quadratic_from_json(const njson& j);

struct SymbolInput {
  PolynomialSymbol p0;
  PolynomialSymbol p1;  // zero symbol when absent
  bool has_subprincipal = false;
};

// {"n": int, "terms": [{"alpha": [n], "beta": [n], "re": f, "im": f}],
//  "subprincipal": same shape} with the subprincipal part optional.
SymbolInput symbol_from_json(const njson& j);

struct ScanConfig {
  std::vector<Complex> z_grid;
  std::vector<double> h;
  int levels = 0;  // 0 = not given
};

// {"z_grid": {"re": [min,max,steps], "im": [min,max,steps]}
//            | {"circle": {"center": [re,im], "radius": f, "points": int}},
//  "h": [..], "levels": int}. A grid with no points is an "empty grid" error.
ScanConfig scan_config_from_json(const njson& j);

struct Prop1Config {
  double epsilon = 0.0;
  double delta = 0.0;
  double T = 0.0;
  PropGrid grid;
  bool has_grid = false;
};

// {"epsilon": f, "delta": f, "T": f, "grid": {"radii": [..], "angular": int}}
// with grid optional.
Prop1Config prop1_config_from_json(const njson& j);

// Emission helpers.
njson json_of_complex(Complex z);
njson json_of_vec(const Vec& v);
njson json_of_mat(const Mat& m);   // array of row arrays
njson json_of_cmat(const CMat& m); // {"re": .., "im": ..}

// Deterministic writer: 2-space indent, 17 significant digits for floats.
void write_json(const njson& j, std::ostream& out);
std::string json_string(const njson& j);

}  // namespace qsl
