// fbtool: command-line front end for the frame-bundle laboratory.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "framebundle/framebundle.hpp"

using namespace fb;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitInvalid = 2;

struct Common {
  std::string spec_path, builtin;
  std::optional<double> kappa;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string json_path;
};

struct Target {
  std::vector<ImmersedSubmanifold> subs;
  int samples = 20;
  std::uint64_t seed = 1;
  std::optional<double> tol;
};

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* cmd, Common& c) {
  auto* spec = cmd->add_option("--spec", c.spec_path, "manifold spec file");
  auto* bi = cmd->add_option("--builtin", c.builtin, "builtin submanifold name, or 'all'");
  spec->excludes(bi);
  cmd->add_option("--kappa", c.kappa, "curvature of the ambient sphere for great2/great3")->check(CLI::PositiveNumber);
  cmd->add_option("--samples", c.samples, "sample points per submanifold")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "seed for point and field sampling");
  cmd->add_option("--tol", c.tol, "tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--json", c.json_path, "write a JSON report to PATH ('-' for stdout)");
}

Target resolve(const Common& c, int default_samples) {
  Target t;
  t.samples = default_samples;
  if (!c.spec_path.empty()) {
    ManifoldSpec s;
    try {
      s = load_spec(c.spec_path);
    } catch (const SpecError& e) {
      throw InvalidInput(e.what());
    }
    if (c.kappa) s.kappa = *c.kappa;
    if (s.options.samples) t.samples = *s.options.samples;
    if (s.options.seed) t.seed = *s.options.seed;
    t.tol = s.options.tol;
    try {
      t.subs.push_back(s.submanifold());
    } catch (const std::exception& e) {
      throw InvalidInput(c.spec_path + ": " + e.what());
    }
  } else if (!c.builtin.empty()) {
    const double kappa = c.kappa.value_or(kDefaultKappa);
    if (lowercase(c.builtin) == "all") {
      for (const auto& b : builtin_list()) t.subs.push_back(builtin_submanifold(b.name, kappa));
    } else {
      if (!is_builtin(c.builtin)) throw InvalidInput("unknown builtin '" + c.builtin + "' (see --list-builtins)");
      t.subs.push_back(builtin_submanifold(c.builtin, kappa));
    }
  } else {
    throw InvalidInput("one of --spec or --builtin is required");
  }
  if (c.samples) t.samples = *c.samples;
  if (c.seed) t.seed = *c.seed;
  if (c.tol) t.tol = *c.tol;
  return t;
}

json header(const std::string& command, const Target& t) {
  json j;
  j["schema"] = kReportSchema;
  j["version"] = kVersion;
  j["command"] = command;
  j["seed"] = std::to_string(t.seed);
  j["samples"] = t.samples;
  auto names = json::array();
  for (const auto& M : t.subs) names.push_back(M.name());
  j["submanifolds"] = names;
  return j;
}

json describe(const ImmersedSubmanifold& M) {
  json j;
  j["name"] = M.name();
  j["dim"] = M.p();
  j["ambient"] = {{"dim", M.dim()}, {"metric", M.ambient().name()}};
  auto map = json::array();
  for (int i = 0; i < M.dim(); ++i) map.push_back(M.map_component(i).to_string());
  j["map"] = map;
  auto dom = json::array();
  for (auto [lo, hi] : M.domain().bounds) dom.push_back({number17(lo), number17(hi)});
  j["domain"] = dom;
  return j;
}

json vec17(const VecD& v) {
  auto a = json::array();
  for (double x : v) a.push_back(number17(x));
  return a;
}

void emit(const std::string& path, json j, double runtime) {
  if (path.empty()) return;
  j["meta"] = {{"timestamp", verify_detail::utc_timestamp()}, {"runtime_seconds", number17(runtime)}};
  const std::string s = j.dump(2) + "\n";
  if (path == "-") {
    std::cout << s;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << s;
}

// With the report on stdout, the human-readable text moves to stderr.
std::FILE* text_out(const Common& c) { return c.json_path == "-" ? stderr : stdout; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- verify --------------------------------------------------------------------

int cmd_verify(const Common& c, const std::vector<std::string>& only, unsigned threads, bool quiet) {
  const auto t0 = std::chrono::steady_clock::now();
  Target t = resolve(c, 20);
  SuiteOptions o;
  o.samples = t.samples;
  o.seed = t.seed;
  o.tolerance = t.tol;
  o.only = only;
  o.threads = threads;
  const auto rep = run_suite(t.subs, o);
  if (!quiet) {
    std::fprintf(text_out(c), "%-34s %-10s %-9s %-9s %s\n", "identity", "on", "max", "tol", "result");
    for (const auto& r : rep.cases) {
      const char* verdict = r.pass ? "pass" : (r.vacuous ? "FAIL (vacuous)" : (r.error.empty() ? "FAIL" : "ERROR"));
      std::fprintf(text_out(c), "%-34s %-10s %-9.2e %-9.1e %s\n", r.id.c_str(), r.submanifold.c_str(), r.max_residual, r.tolerance,
                  verdict);
      if (!r.error.empty()) std::fprintf(text_out(c), "    %s\n", r.error.c_str());
    }
  }
  std::size_t passed = 0;
  for (const auto& r : rep.cases) passed += r.pass;
  std::fprintf(text_out(c), "%zu/%zu cases passed\n", passed, rep.cases.size());
  json j = to_json(rep);
  j.erase("meta");
  emit(c.json_path, std::move(j), seconds_since(t0));
  return rep.all_pass() ? kExitOk : kExitFail;
}

// ---- report: per-point geometry ----------------------------------------------

int cmd_report(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  Target t = resolve(c, 5);
  json j = header("report", t);
  auto subs = json::array();
  for (const auto& M : t.subs) {
    json s = describe(M);
    auto pts = json::array();
    std::fprintf(text_out(c), "%s: p = %d, n = %d, ambient %s\n", M.name().c_str(), M.p(), M.n(), M.ambient().name().c_str());
    for (const auto& u : sample_points(M.domain(), t.samples, t.seed, "report")) {
      LocalGeometry L(M, u, 3);
      Operators ops(L);
      FrameBundle B(ops);
      OmnGeometry G(B);
      GaussMap g(ops);
      const auto r = g.residuals();
      const double h = G.mean_curvature().norm;
      const MatD P = values(ops.P());
      Eigen::MatrixXd Pe(L.p(), L.p());
      for (int a = 0; a < L.p(); ++a)
        for (int b = 0; b < L.p(); ++b) Pe(a, b) = P(a, b);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Pe);
      VecD eig(es.eigenvalues().data(), es.eigenvalues().data() + L.p());
      json p;
      p["u"] = vec17(u);
      p["x"] = vec17(L.x());
      p["P_eigenvalues"] = vec17(eig);
      p["mean_curvature_omn"] = number17(h);
      p["r_H1"] = number17(r.r_H1);
      p["r_H2"] = number17(r.r_H2);
      p["r_H3"] = number17(r.r_H3);
      p["r_M1"] = number17(r.r_M1());
      p["r_M2"] = number17(r.r_M2);
      pts.push_back(p);
      std::fprintf(text_out(c), "  u = (");
      for (std::size_t i = 0; i < u.size(); ++i) std::fprintf(text_out(c), "%s%.4f", i ? ", " : "", u[i]);
      std::fprintf(text_out(c), ")  |H| = %.3e  r_H = (%.3e, %.3e, %.3e)  r_M2 = %.3e\n", h, r.r_H1, r.r_H2, r.r_H3, r.r_M2);
    }
    s["points"] = pts;
    subs.push_back(s);
  }
  j["results"] = subs;
  emit(c.json_path, std::move(j), seconds_since(t0));
  return kExitOk;
}

// ---- minimality / harmonicity -------------------------------------------------

int cmd_minimality(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  Target t = resolve(c, 20);
  const double tol = t.tol.value_or(1e-6);
  json j = header("minimality", t);
  j["tolerance"] = number17(tol);
  auto subs = json::array();
  bool ok = true;
  for (const auto& M : t.subs) {
    const auto th = theorem_check(M, t.samples, tol, t.seed);
    const auto tg = is_totally_geodesic(M, t.samples, 1e-8, t.seed);
    std::fprintf(text_out(c), "%s: O(M,N) %s (max |H| = %.3e); gauss map %s (max r_H = %.3e); verdicts %s%s\n", M.name().c_str(),
                th.minimal ? "minimal" : "not minimal", th.max_mean_curvature,
                th.harmonic ? "harmonic" : "not harmonic", th.max_harmonic(), th.agree ? "agree" : "DISAGREE",
                th.separated ? "" : " (not separated)");
    std::fprintf(text_out(c), "  r_H1 %.6e  r_H2 %.6e  r_H3 %.6e  r_M2 %.6e; O(M,N) %stotally geodesic\n", th.max_r_H1, th.max_r_H2,
                th.max_r_H3, th.max_r_M2, tg.totally_geodesic ? "" : "not ");
    ok = ok && th.agree && th.separated && th.m1_is_h1;
    json s;
    s["submanifold"] = M.name();
    s["minimal"] = th.minimal;
    s["harmonic"] = th.harmonic;
    s["agree"] = th.agree;
    s["separated"] = th.separated;
    s["m1_is_h1"] = th.m1_is_h1;
    s["totally_geodesic"] = tg.totally_geodesic;
    s["max_mean_curvature"] = number17(th.max_mean_curvature);
    s["max_r_H1"] = number17(th.max_r_H1);
    s["max_r_H2"] = number17(th.max_r_H2);
    s["max_r_H3"] = number17(th.max_r_H3);
    s["max_r_M1"] = number17(th.max_r_H1);
    s["max_r_M2"] = number17(th.max_r_M2);
    s["max_split_identity"] = number17(th.max_split_identity);
    s["max_pairing_identity"] = number17(th.max_pairing_identity);
    subs.push_back(s);
  }
  j["results"] = subs;
  emit(c.json_path, std::move(j), seconds_since(t0));
  return ok ? kExitOk : kExitFail;
}

// ---- sectional curvature -------------------------------------------------------

struct Range {
  double lo = std::numeric_limits<double>::infinity(), hi = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    ++count;
  }
  json to_json() const {
    if (!count) return nullptr;
    return {{"min", number17(lo)}, {"max", number17(hi)}, {"planes", count}};
  }
};

int cmd_sectional(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  Target t = resolve(c, 10);
  json j = header("sectional", t);
  auto subs = json::array();
  for (const auto& M : t.subs) {
    Range hor, mix, ver, hor_t, mix_t, ver_t;
    for (const auto& u : sample_points(M.domain(), t.samples, t.seed, "sectional")) {
      LocalGeometry L(M, u, 3);
      Operators ops(L);
      FrameBundle B(ops);
      OmnGeometry G(B);
      const int N = L.dim(), p = L.p();
      std::vector<MatJ> h;
      for (int i = 0; i < N; ++i)
        for (int k = i + 1; k < N; ++k)
          if (L.is_tangent_index(i) == L.is_tangent_index(k)) h.push_back(skew_basis(N, i, k));
      for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b) {
          hor.add(G.sectional_horizontal(L.basis(a), L.basis(b)));
          hor_t.add(G.sectional_tensor(G.horizontal(L.basis(a)), G.horizontal(L.basis(b))));
        }
      for (int a = 0; a < p; ++a)
        for (const auto& T : h) {
          mix.add(G.sectional_mixed(L.basis(a), T));
          mix_t.add(G.sectional_tensor(G.horizontal(L.basis(a)), G.vertical(T)));
        }
      for (std::size_t i = 0; i < h.size(); ++i)
        for (std::size_t k = i + 1; k < h.size(); ++k) {
          ver.add(G.sectional_vertical(h[i], h[k]));
          ver_t.add(G.sectional_tensor(G.vertical(h[i]), G.vertical(h[k])));
        }
    }
    auto line = [&c](const char* what, const Range& f, const Range& tr) {
      if (!f.count) {
        std::fprintf(text_out(c), "  %-10s (no planes)\n", what);
        return;
      }
      std::fprintf(text_out(c), "  %-10s formula [%.9f, %.9f]  curvature tensor [%.9f, %.9f]\n", what, f.lo, f.hi, tr.lo, tr.hi);
    };
    std::fprintf(text_out(c), "%s (ambient %s):\n", M.name().c_str(), M.ambient().name().c_str());
    line("horizontal", hor, hor_t);
    line("mixed", mix, mix_t);
    line("vertical", ver, ver_t);
    json s;
    s["submanifold"] = M.name();
    s["ambient"] = M.ambient().name();
    s["horizontal"] = {{"formula", hor.to_json()}, {"curvature_tensor", hor_t.to_json()}};
    s["mixed"] = {{"formula", mix.to_json()}, {"curvature_tensor", mix_t.to_json()}};
    s["vertical"] = {{"formula", ver.to_json()}, {"curvature_tensor", ver_t.to_json()}};
    subs.push_back(s);
  }
  j["results"] = subs;
  emit(c.json_path, std::move(j), seconds_since(t0));
  return kExitOk;
}

void list_builtins() {
  for (const auto& b : builtin_list())
    std::printf("%-9s %s%s\n", b.name.c_str(), b.description.c_str(), b.takes_kappa ? " [--kappa]" : "");
}

void list_identities() {
  for (const auto& c : registry())
    std::printf("%-34s %-8s order %d  tol %.0e  %s\n", c.id.c_str(),
                c.kind == CaseKind::identity ? "identity" : "oracle", c.derivative_order, c.tolerance,
                c.statement.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adapted frame bundles O(M,N): formulas, identity checks and the minimality/harmonicity test"};
  app.set_version_flag("--version", std::string(kVersion));
  bool lb = false, li = false;
  app.add_flag("--list-builtins", lb, "list builtin submanifolds");
  app.add_flag("--list-identities", li, "list registered identities");

  Common cv, cr, cm, cs;
  std::vector<std::string> only;
  unsigned threads = 0;
  bool quiet = false;
  auto* verify = app.add_subcommand("verify", "evaluate every registered identity at sampled points");
  add_common(verify, cv);
  verify->add_option("--only", only, "run only identities whose id starts with PREFIX");
  verify->add_option("--threads", threads, "worker threads (0 = all cores)");
  verify->add_flag("--quiet", quiet, "print the summary line only");
  auto* report = app.add_subcommand("report", "per-point geometry: P, mean curvature of O(M,N), H/M residuals");
  add_common(report, cr);
  auto* minimality = app.add_subcommand("minimality", "minimality of O(M,N) against harmonicity of the Gauss map");
  add_common(minimality, cm);
  auto* sectional = app.add_subcommand("sectional", "sectional curvatures of O(M,N) on frame planes");
  add_common(sectional, cs);
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (lb || li) {
      if (lb) list_builtins();
      if (li) list_identities();
      return kExitOk;
    }
    if (verify->parsed()) return cmd_verify(cv, only, threads, quiet);
    if (report->parsed()) return cmd_report(cr);
    if (minimality->parsed()) return cmd_minimality(cm);
    if (sectional->parsed()) return cmd_sectional(cs);
    std::cerr << app.help();
    return kExitInvalid;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}
