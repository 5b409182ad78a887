#include "qsl/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>
#include <string>

#include "qsl/errors.hpp"
#include "qsl/flow_weights.hpp"
#include "qsl/json_io.hpp"
#include "qsl/spectral_lab.hpp"
#include "qsl/symbol_models.hpp"
#include "qsl/symplectic.hpp"
#include "qsl/version.hpp"
#include "qsl/weight_builder.hpp"

namespace qsl {

namespace {

const char* command_name(Command c) {
  switch (c) {
    case Command::AnalyzeQuadratic: return "analyze-quadratic";
    case Command::Spectrum: return "spectrum";
    case Command::Deform: return "deform";
    case Command::Weight: return "weight";
    case Command::CertifyProp1: return "certify-prop1";
    case Command::ScanResolvent: return "scan-resolvent";
    case Command::VerifyIdentities: return "verify-identities";
  }
  return "?";
}

njson config_json(const RunConfig& cfg) {
  njson h = njson::array();
  for (double x : cfg.h) h.push_back(x);
  return njson{{"command", command_name(cfg.command)},
               {"input", cfg.input_path},
               {"out", cfg.out_path},
               {"grid_file", cfg.grid_file},
               {"tol", cfg.tol},
               {"radius", cfg.radius},
               {"levels", cfg.levels},
               {"h", h},
               {"delta", cfg.delta},
               {"epsilon", cfg.epsilon},
               {"T", cfg.T},
               {"seed", cfg.seed}};
}

void write_report(const RunConfig& cfg, const njson& payload) {
  njson doc{{"version", kVersion}, {"config", config_json(cfg)}, {"report", payload}};
  if (cfg.out_path.empty()) {
    write_json(doc, std::cout);
    return;
  }
  std::ofstream out(cfg.out_path);
  if (!out) throw InputError("cannot write '" + cfg.out_path + "'");
  write_json(doc, out);
}

njson json_of_lattice(const SpectrumLattice& lattice) {
  njson gens = njson::array();
  for (const SpectrumGenerator& g : lattice.generators)
    gens.push_back(njson{{"mu", json_of_complex(g.mu)}, {"r", g.r}});
  njson pts = njson::array();
  for (const auto& pt : lattice.points) {
    njson k = njson::array();
    for (int ki : pt.k) k.push_back(ki);
    pts.push_back(njson{{"value", json_of_complex(pt.value)}, {"k", k}});
  }
  return njson{{"generators", gens},
               {"ground", json_of_complex(lattice.ground)},
               {"radius", lattice.radius},
               {"points", pts}};
}

int analyze_quadratic(const RunConfig& cfg) {
  const QuadraticForm q = quadratic_from_json(load_json_file(cfg.input_path));
  const PartialEllipticity pe = is_elliptic_on_singular_space(q);
  std::string cls;
  if (!pe.elliptic)
    cls = pe.vanishes ? "fails: q vanishes on the singular space"
                      : "fails: q not elliptic on the singular space";
  else
    cls = pe.space.dim() == 0 ? "partially elliptic (vacuous: S = {0})"
                              : "partially elliptic";
  njson payload{{"n", q.n},
                {"dim_singular_space", pe.space.dim()},
                {"classification", cls},
                {"singular_basis", json_of_mat(pe.space.basis)}};
  if (pe.elliptic)
    payload["spectrum"] = json_of_lattice(quadratic_spectrum(q, cfg.radius));
  else
    payload["spectrum"] = nullptr;
  write_report(cfg, payload);
  return 0;
}

int spectrum(const RunConfig& cfg) {
  const QuadraticForm q = quadratic_from_json(load_json_file(cfg.input_path));
  write_report(cfg, json_of_lattice(quadratic_spectrum(q, cfg.radius)));
  return 0;
}

int deform_cmd(const RunConfig& cfg) {
  const QuadraticForm q = quadratic_from_json(load_json_file(cfg.input_path));
  const FlowAverage A = flow_average(q, cfg.T);
  const QuadraticWeight G = weight_go(q, cfg.T);
  const double residual = check_escape_identity(q, G, A);
  const DeformedForm d = deform(q, G, cfg.delta);
  write_report(cfg, njson{{"A", json_of_mat(A.A)},
                          {"G", json_of_mat(G.G)},
                          {"residual", residual},
                          {"ellipticity_radius", ellipticity_radius(d)},
                          {"delta", cfg.delta}});
  return 0;
}

// The verified critical points of p0, searched from the origin plus any seeds
// the caller supplies.
std::vector<CriticalPoint> characteristic_points(const PolynomialSymbol& p0,
                                                 const PolynomialSymbol* p1, double tol) {
  std::vector<Vec> seeds{Vec::Zero(p0.dim())};
  const std::vector<CriticalPoint> pts = find_characteristic_points(p0, seeds, tol, p1);
  if (pts.empty())
    throw NotCritical("no doubly characteristic point found from the origin seed");
  return pts;
}

std::vector<Vec> center_list(const std::vector<CriticalPoint>& pts) {
  std::vector<Vec> centers;
  for (const CriticalPoint& cp : pts) centers.push_back(cp.X);
  return centers;
}

double default_bump(const std::vector<Vec>& centers) {
  if (centers.size() < 2) return 0.0;
  double minsep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = i + 1; j < centers.size(); ++j)
      minsep = std::min(minsep, (centers[i] - centers[j]).norm());
  return std::min(1.0, 0.5 * minsep);
}

int weight_cmd(const RunConfig& cfg) {
  const SymbolInput in = symbol_from_json(load_json_file(cfg.input_path));
  const std::vector<Vec> centers = center_list(characteristic_points(in.p0, nullptr, cfg.tol));

  WeightField field;
  field.p0 = in.p0;
  field.epsilon = cfg.epsilon;
  field.T = cfg.T;
  field.centers = centers;
  field.bump_radius = default_bump(centers);

  // Evaluation points: user-supplied, or axis points on dyadic shells.
  std::vector<Vec> points;
  if (!cfg.grid_file.empty()) {
    const njson g = load_json_file(cfg.grid_file);
    if (!g.is_object() || !g.contains("points") || !g.at("points").is_array())
      throw InputError("weight grid file needs a 'points' array");
    for (const njson& row : g.at("points")) {
      if (!row.is_array() || int(row.size()) != in.p0.dim())
        throw InputError("weight grid points must have length 2n");
      Vec X(in.p0.dim());
      for (int i = 0; i < X.size(); ++i) X[i] = row[i].get<double>();
      points.push_back(X);
    }
  } else {
    const double root = std::sqrt(cfg.epsilon);
    for (const Vec& c : centers)
      for (double r = 0.5 * root; r <= 1.0; r *= 2.0)
        for (int axis = 0; axis < in.p0.dim(); ++axis)
          for (double sgn : {1.0, -1.0}) {
            Vec X = c;
            X[axis] += sgn * r;
            points.push_back(X);
          }
  }

  njson rows = njson::array();
  for (const Vec& X : points) {
    const auto [v, grad] = field.value_gradient(X);
    rows.push_back(njson{{"X", json_of_vec(X)}, {"value", v}, {"gradient", json_of_vec(grad)}});
  }
  njson ctr = njson::array();
  for (const Vec& c : centers) ctr.push_back(json_of_vec(c));
  write_report(cfg, njson{{"epsilon", cfg.epsilon},
                          {"T", cfg.T},
                          {"centers", ctr},
                          {"points", rows}});
  return 0;
}

int certify_prop1(const RunConfig& cfg) {
  const SymbolInput in = symbol_from_json(load_json_file(cfg.input_path));
  double eps = cfg.epsilon, delta = cfg.delta, T = cfg.T;
  PropGrid grid;
  grid.seed = cfg.seed;
  if (!cfg.grid_file.empty()) {
    const Prop1Config pc = prop1_config_from_json(load_json_file(cfg.grid_file));
    eps = pc.epsilon;
    delta = pc.delta;
    T = pc.T;
    if (pc.has_grid) {
      grid.radii = pc.grid.radii;
      grid.angular = pc.grid.angular;
    }
  }
  const std::vector<Vec> centers = center_list(characteristic_points(in.p0, nullptr, cfg.tol));
  const PropReport rep = verify_prop1(in.p0, centers, eps, delta, T, grid);

  static const char* names[5] = {"bounded_size", "vanishing_near_zero_set",
                                 "gradient_size", "deformed_lower_bound",
                                 "segment_positivity"};
  njson items = njson::array();
  for (int i = 0; i < 5; ++i) {
    const PropItem& it = rep.items[i];
    items.push_back(njson{{"name", names[i]},
                          {"pass", it.pass},
                          {"fitted", it.fitted},
                          {"worst", it.worst},
                          {"worst_at", json_of_vec(it.worst_at)},
                          {"note", it.note}});
  }
  write_report(cfg, njson{{"epsilon", rep.epsilon},
                          {"delta", rep.delta},
                          {"T", rep.T},
                          {"grid_points", rep.grid_points},
                          {"items", items},
                          {"c_tilde", rep.c_tilde},
                          {"all_pass", rep.all_pass()}});
  return 0;
}

int scan_resolvent(const RunConfig& cfg) {
  if (cfg.grid_file.empty())
    throw InputError("scan-resolvent needs a scan config (--grid-file)");
  if (cfg.out_path.empty())
    throw InputError("scan-resolvent needs an output CSV path (--out)");
  const SymbolInput in = symbol_from_json(load_json_file(cfg.input_path));
  ScanConfig sc = scan_config_from_json(load_json_file(cfg.grid_file));
  if (sc.h.empty()) sc.h = cfg.h;
  if (sc.h.empty()) throw InputError("no semiclassical parameters: set \"h\" or --h");
  const int levels = sc.levels > 0 ? sc.levels : cfg.levels;

  const std::vector<CriticalPoint> pts = characteristic_points(in.p0, &in.p1, cfg.tol);
  double zmax = 0.0;
  for (Complex z : sc.z_grid) zmax = std::max(zmax, std::abs(z));
  // Pinned admissibility margin: a tenth of the unit lattice scale.
  const AdmissibleRegion region = make_admissible_region(pts, zmax + 1.0, 0.1);

  HermiteBasisSpec basis;
  basis.n = in.p0.dim() / 2;
  basis.levels = levels;
  const ResolventScan scan = resolvent_scan(in.p0, in.p1, sc.z_grid, sc.h, basis, region);

  std::ofstream csv(cfg.out_path);
  if (!csv) throw InputError("cannot write '" + cfg.out_path + "'");
  scan.write_csv(csv);

  njson fits = njson::array();
  for (double f : scan.c0_fit) fits.push_back(f);
  njson doc{{"version", kVersion},
            {"config", config_json(cfg)},
            {"report",
             njson{{"csv", cfg.out_path},
                   {"z_points", int(sc.z_grid.size())},
                   {"levels", levels},
                   {"c0_fit_per_h", fits}}}};
  write_json(doc, std::cout);
  return 0;
}

int verify_identities(const RunConfig& cfg) {
  const QuadraticForm q = quadratic_from_json(load_json_file(cfg.input_path));
  const int n = q.n;
  njson checks = njson::array();
  bool all = true;
  auto add = [&](const char* name, double residual, double tol) {
    const bool pass = residual <= tol;
    all = all && pass;
    checks.push_back(njson{{"name", name}, {"residual", residual}, {"pass", pass}});
  };

  const HamiltonMap F = hamilton_map(q);
  add("hamilton_map_skew_symmetry", hamilton_skewness_defect(F), 1e-10);

  const FlowAverage A = flow_average(q, cfg.T);
  const QuadraticWeight G = weight_go(q, cfg.T);
  add("escape_identity", check_escape_identity(q, G, A), 1e-9);

  // Second-order expansion of the deformed coefficient matrix in delta.
  {
    const double delta = 0.1;
    const Mat S = sigma_matrix(n);
    const CMat GsQ = (G.G * S).cast<Complex>() * q.Q;
    const CMat QsG = q.Q * (S * G.G).cast<Complex>();
    const CMat D = Complex(0, 2) * (GsQ - QsG);
    const CMat E = 4.0 * (G.G * S).cast<Complex>() * q.Q * (S * G.G).cast<Complex>();
    const CMat expansion = q.Q + delta * D + delta * delta * E;
    const CMat Qd = deform(q, G, delta).form.Q;
    add("deformation_expansion", (Qd - expansion).norm() / std::max(1.0, q.Q.norm()), 1e-10);
  }

  const SingularSpace S = singular_space(q);
  add("weight_vanishes_on_singular_space",
      S.dim() == 0 ? 0.0 : (G.G * S.basis).norm() / std::max(1.0, G.G.norm()), 1e-8);

  const PartialEllipticity pe = is_elliptic_on_singular_space(q);
  if (pe.elliptic) {
    const SpectrumLattice lattice = quadratic_spectrum(q, cfg.radius);
    Complex ground(0, 0);
    for (const SpectrumGenerator& g : lattice.generators) ground += double(g.r) * g.mu;
    add("spectrum_ground_sum", std::abs(lattice.ground - ground), 1e-12);
  }

  write_report(cfg, njson{{"checks", checks}, {"all_pass", all}});
  return 0;
}

void validate_config(const RunConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw InputError("--tol must be positive");
  if (!(cfg.radius > 0.0)) throw InputError("--radius must be positive");
  if (!(cfg.epsilon > 0.0)) throw InputError("--epsilon must be positive");
  if (!(cfg.T > 0.0)) throw InputError("--T must be positive");
  if (cfg.delta < 0.0) throw InputError("--delta must be nonnegative");
  for (double h : cfg.h)
    if (!(h > 0.0)) throw InputError("--h values must be positive");
}

}  // namespace

int run(const RunConfig& cfg) {
  try {
    validate_config(cfg);
    switch (cfg.command) {
      case Command::AnalyzeQuadratic: return analyze_quadratic(cfg);
      case Command::Spectrum: return spectrum(cfg);
      case Command::Deform: return deform_cmd(cfg);
      case Command::Weight: return weight_cmd(cfg);
      case Command::CertifyProp1: return certify_prop1(cfg);
      case Command::ScanResolvent: return scan_resolvent(cfg);
      case Command::VerifyIdentities: return verify_identities(cfg);
    }
    return 2;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "analysis failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"spectral objects and resolvent certificates for quadratic and "
               "polynomial Weyl symbols"};
  // --h is a domain flag, so help must not claim the single-dash short form.
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);

  RunConfig cfg;
  const std::pair<const char*, Command> commands[] = {
      {"analyze-quadratic", Command::AnalyzeQuadratic},
      {"spectrum", Command::Spectrum},
      {"deform", Command::Deform},
      {"weight", Command::Weight},
      {"certify-prop1", Command::CertifyProp1},
      {"scan-resolvent", Command::ScanResolvent},
      {"verify-identities", Command::VerifyIdentities},
  };
  const std::map<std::string, const char*> descriptions = {
      {"analyze-quadratic", "singular space, classification, and spectrum of a quadratic form"},
      {"spectrum", "eigenvalue lattice of a quadratic form"},
      {"deform", "flow average, escape weight, and deformed-form ellipticity"},
      {"weight", "evaluate the mollified escape weight of a polynomial symbol"},
      {"certify-prop1", "certify the escape-weight lower bounds on a grid"},
      {"scan-resolvent", "s_min(P - hz) over a z/h grid, CSV output"},
      {"verify-identities", "internal consistency battery for a quadratic form"},
  };

  for (const auto& [name, cmd] : commands) {
    CLI::App* sc = app.add_subcommand(name, descriptions.at(name));
    sc->set_help_flag("--help", "print help and exit");
    sc->add_option("input", cfg.input_path, "input JSON")->required();
    sc->add_option("--out", cfg.out_path, "output path (default stdout)");
    sc->add_option("--grid-file", cfg.grid_file, "grid / scan config JSON");
    sc->add_option("--tol", cfg.tol, "critical-point search tolerance");
    sc->add_option("--radius", cfg.radius, "spectrum lattice radius");
    sc->add_option("--levels", cfg.levels, "Hermite levels per dimension");
    sc->add_option("--h", cfg.h, "semiclassical parameter (repeatable)");
    sc->add_option("--delta", cfg.delta, "deformation strength");
    sc->add_option("--epsilon", cfg.epsilon, "mollification scale");
    sc->add_option("--T", cfg.T, "flow-average time");
    sc->add_option("--seed", cfg.seed, "rng seed for sampled directions");
    const Command c = cmd;
    sc->callback([&cfg, c] { cfg.command = c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  return run(cfg);
}

}  // namespace qsl
