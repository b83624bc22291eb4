#include "tfsolve/tfsolve.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace tfsolve;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kValidation = 2, kConvergence = 3, kAcceptance = 4 };

struct Globals {
  unsigned digits = 30;
  bool digits_given = false;
  std::string output = "text";
  std::string out_path;
  int jobs = 1;
  bool timing = false;
};

struct Report {
  std::string method;
  json config;
  std::string value;
  std::string reference;
  int digits_agreed = 0;
  json details = json::object();
  std::string text;  // convergence table for text output
};

unsigned resolve_digits(const Globals& g, unsigned fallback) {
  if (g.digits_given) return g.digits;
  if (const char* env = std::getenv("TFSOLVE_DIGITS")) {
    try {
      int d = std::stoi(env);
      if (d > 0) return static_cast<unsigned>(d);
    } catch (const std::exception&) {
    }
    throw ValidationError("TFSOLVE_DIGITS must be a positive integer");
  }
  return fallback;
}

void emit(const Globals& g, const std::string& body) {
  if (g.out_path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(g.out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + g.out_path);
  f << body;
}

std::string render(const Globals& g, const Report& r, double ms) {
  if (g.output == "json") {
    json j{{"method", r.method},
           {"config", r.config},
           {"value", r.value},
           {"reference", r.reference},
           {"digits_agreed", r.digits_agreed},
           {"details", r.details}};
    if (g.timing) j["runtime_ms"] = static_cast<long>(ms);
    return j.dump(2) + "\n";
  }
  if (g.output == "csv") {
    std::ostringstream s;
    s << "method,value,reference,digits_agreed" << (g.timing ? ",runtime_ms" : "") << "\n";
    s << r.method << ',' << r.value << ',' << r.reference << ',' << r.digits_agreed;
    if (g.timing) s << ',' << static_cast<long>(ms);
    s << "\n";
    return s.str();
  }
  std::ostringstream s;
  s << r.text;
  s << "value      " << r.value << "\n";
  s << "reference  " << r.reference << "\n";
  s << "agreed     " << r.digits_agreed << " digits\n";
  if (g.timing) s << "runtime    " << static_cast<long>(ms) << " ms\n";
  return s.str();
}

std::string slope_key(EquationKind k) { return k == EquationKind::Atom ? "atom_slope" : "magnetic_slope_50"; }

struct SlopeArgs {
  std::string equation = "atom";
  std::string method = "phm";
  int D = 20;
  int d = 3;
  int N = 60;
  int target = 0;
  double x0_guess = 3;
};

Report run_slope(const SlopeArgs& a, unsigned digits) {
  const auto kind = parse_equation(a.equation);
  PrecisionContext ctx(digits);
  PrecisionScope scope(ctx);
  Report r;
  r.method = a.method;
  r.config = {{"equation", a.equation}, {"digits", digits}};
  const Real ref = ReferenceStore::value(slope_key(kind), ctx);
  r.reference = std::string(ReferenceStore::get(slope_key(kind)).value);
  Real value;
  if (a.method == "phm") {
    r.config["D"] = a.D;
    r.config["d"] = a.d;
    auto seq = critical_slope_phm(kind, a.d, a.D, ctx);
    value = seq.roots.back();
    r.details = to_json(seq, std::min(digits, 40u));
    r.text = to_text(seq, std::min(digits, 40u));
  } else if (a.method == "shoot") {
    const int target = a.target > 0 ? a.target : std::max(5, static_cast<int>(digits) / 3);
    r.config["target"] = target;
    auto s = critical_slope_shoot(kind, target, ctx);
    value = s.slope;
    r.details = {{"lo", to_decimal(s.lo, target + 5)},
                 {"hi", to_decimal(s.hi, target + 5)},
                 {"bisections", s.bisections},
                 {"verdict", to_string(s.final_verdict)}};
    r.text = "# bisection " + std::to_string(s.bisections) + " steps, bracket [" + to_decimal(s.lo, target + 5) +
             ", " + to_decimal(s.hi, target + 5) + "], " + to_string(s.final_verdict) + "\n";
  } else if (a.method == "cheb") {
    if (kind != EquationKind::Magnetic) throw ValidationError("method cheb solves the magnetic equation only");
    r.config["N"] = a.N;
    auto s = cheb_solve(a.N, ctx, Real(a.x0_guess));
    value = slope_from_cheb(s);
    json norms = json::array();
    std::ostringstream t;
    t << "# Newton updates\n";
    for (std::size_t i = 0; i < s.update_norms.size(); ++i) {
      norms.push_back(to_decimal(s.update_norms[i], 3));
      t << std::setw(4) << i + 1 << "  " << to_decimal(s.update_norms[i], 3) << "\n";
    }
    r.details = {{"update_norms", norms},
                 {"x0", to_decimal(s.x0, digits)},
                 {"residual_norm", to_decimal(s.residual_norm, 3)},
                 {"mu", s.mu ? json(to_decimal(*s.mu, 4)) : json(nullptr)}};
    r.text = t.str();
  } else if (a.method == "series" || a.method == "pade" || a.method == "shafer") {
    throw ValidationError("method " + a.method + " yields x0, not the slope; use the x0 command");
  } else {
    throw ValidationError("unknown method '" + a.method + "' (slope takes phm, shoot or cheb)");
  }
  r.value = to_decimal(value, digits);
  r.digits_agreed = agreed_digits(value, ref);
  return r;
}

struct X0Args {
  std::string equation = "magnetic";
  std::string method = "cheb";
  int N = 60;
  int M = -1;
  int K = 20;
  int target = 0;
  double x0_guess = 3;
};

Report run_x0(const X0Args& a, unsigned digits) {
  if (parse_equation(a.equation) != EquationKind::Magnetic)
    throw ValidationError("x0 is defined for the magnetic equation only");
  PrecisionContext ctx(digits);
  PrecisionScope scope(ctx);
  Report r;
  r.method = a.method;
  r.config = {{"equation", a.equation}, {"digits", digits}};
  const Real ref = ReferenceStore::value("magnetic_x0", ctx);
  r.reference = std::string(ReferenceStore::get("magnetic_x0").value);
  Real value;
  if (a.method == "cheb") {
    r.config["N"] = a.N;
    auto s = cheb_solve(a.N, ctx, Real(a.x0_guess));
    value = s.x0;
    r.details = {{"slope", to_decimal(slope_from_cheb(s), digits)},
                 {"iterations", s.iterations},
                 {"residual_norm", to_decimal(s.residual_norm, 3)}};
  } else if (a.method == "series") {
    const int M = a.M < 0 ? 61 : a.M;
    r.config["M"] = M;
    value = endpoint_x0_partial_sums(M, ctx);
  } else if (a.method == "pade") {
    const int M = a.M < 0 ? 80 : a.M;
    r.config["M"] = M;
    auto e = vseries_estimates(M, Acceleration::Pade, ctx);
    value = e.x0;
    r.details = {{"slope", to_decimal(e.u0_prime, digits)}, {"J", e.J}, {"K", e.K}};
  } else if (a.method == "shafer") {
    r.config["K"] = a.K;
    auto e = shafer_x0(a.K, ctx);
    value = e.average.re;
    r.details = to_json(std::vector<ShaferEstimate>{e})[0];
    r.text = to_text(std::vector<ShaferEstimate>{e});
  } else if (a.method == "shoot") {
    const int target = a.target > 0 ? a.target : std::max(5, static_cast<int>(digits) / 3);
    r.config["target"] = target;
    auto s = critical_slope_shoot(EquationKind::Magnetic, target, ctx);
    auto tr = integrate(EquationKind::Magnetic, s.slope, Real(4), ctx);
    auto e = detect_x0(tr);
    value = e.x0;
    json w = json::array();
    for (const auto& x : e.window_estimates) w.push_back(to_decimal(x, 20));
    r.details = {{"slope", to_decimal(s.slope, target + 3)}, {"window_estimates", w}};
  } else if (a.method == "phm") {
    throw ValidationError("method phm yields the slope, not x0; use the slope command");
  } else {
    throw ValidationError("unknown method '" + a.method + "' (x0 takes cheb, series, pade, shafer or shoot)");
  }
  r.value = to_decimal(value, digits);
  r.digits_agreed = agreed_digits(value, ref);
  return r;
}

struct TableArgs {
  std::string equation = "atom";
  std::string from = "0";
  std::string step = "10";
  int count = 101;
  int sig = 14;
  std::string slope;
};

std::string run_table(const TableArgs& a, const Globals& g, unsigned digits) {
  const auto kind = parse_equation(a.equation);
  if (a.count <= 0) throw ValidationError("table grid is empty (count must be positive)");
  if (a.sig <= 0) throw ValidationError("--sig must be positive");
  PrecisionContext ctx(digits);
  PrecisionScope scope(ctx);
  auto grid = uniform_grid(a.from, a.step, a.count, ctx);
  Real slope = a.slope.empty() ? ReferenceStore::value(slope_key(kind), ctx) : ctx.real(a.slope);
  auto t = tabulate(kind, slope, grid, a.sig, ctx);
  if (g.output == "json") return to_json(t).dump(2) + "\n";
  return to_csv(t);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arbitrary-precision Thomas-Fermi solvers"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--digits", g.digits, "requested decimal digits (default: TFSOLVE_DIGITS, else 30; bench 60)")
      ->check(CLI::Range(5u, 2000u));
  app.add_option("--output", g.output, "csv, json or text")->check(CLI::IsMember({"csv", "json", "text"}));
  app.add_option("--out", g.out_path, "write the report to this file");
  app.add_option("--jobs", g.jobs, "parallelism cap (work runs on one thread)")->check(CLI::PositiveNumber);
  app.add_flag("--timing", g.timing, "include runtimes in reports");

  SlopeArgs sa;
  auto* slope = app.add_subcommand("slope", "critical slope u'(0)");
  slope->add_option("--equation", sa.equation)->check(CLI::IsMember({"atom", "magnetic"}));
  slope->add_option("--method", sa.method, "phm, shoot or cheb");
  slope->add_option("--D", sa.D, "largest Hankel dimension");
  slope->add_option("--d", sa.d, "Hankel offset");
  slope->add_option("--N", sa.N, "Chebyshev degree");
  slope->add_option("--target", sa.target, "bisection target digits");
  slope->add_option("--x0-guess", sa.x0_guess, "Chebyshev starting x0 in [2, 6]");

  X0Args xa;
  auto* x0 = app.add_subcommand("x0", "magnetic endpoint x0");
  x0->add_option("--equation", xa.equation)->check(CLI::IsMember({"atom", "magnetic"}));
  x0->add_option("--method", xa.method, "cheb, series, pade, shafer or shoot");
  x0->add_option("--N", xa.N, "Chebyshev degree");
  x0->add_option("--M", xa.M, "series order");
  x0->add_option("--K", xa.K, "Hermite-Pade degree");
  x0->add_option("--target", xa.target, "bisection target digits");
  x0->add_option("--x0-guess", xa.x0_guess, "Chebyshev starting x0 in [2, 6]");

  TableArgs ta;
  auto* table = app.add_subcommand("table", "certified u, u' table by integration");
  table->add_option("--equation", ta.equation)->check(CLI::IsMember({"atom", "magnetic"}));
  table->add_option("--from", ta.from, "first grid point (decimal)");
  table->add_option("--step", ta.step, "grid step (decimal)");
  table->add_option("--count", ta.count, "number of grid points");
  table->add_option("--sig", ta.sig, "significant digits to attempt");
  table->add_option("--slope", ta.slope, "slope u'(0) (default: reference value)");

  std::string suite = "paper", only;
  auto* bench = app.add_subcommand("bench", "acceptance suite");
  bench->add_option("--suite", suite)->check(CLI::IsMember({"paper"}));
  bench->add_option("--only", only, "run a single check by id");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }
  g.digits_given = app.get_option("--digits")->count() > 0;

  try {
    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
      return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    };
    if (*slope) {
      auto r = run_slope(sa, resolve_digits(g, 30));
      emit(g, render(g, r, elapsed()));
    } else if (*x0) {
      auto r = run_x0(xa, resolve_digits(g, 30));
      emit(g, render(g, r, elapsed()));
    } else if (*table) {
      if (g.output == "text") g.output = "csv";
      emit(g, run_table(ta, g, resolve_digits(g, 30)));
    } else if (*bench) {
      AcceptanceOptions opts;
      opts.digits = resolve_digits(g, 60);
      std::ostringstream s;
      auto results = run_acceptance(opts, g.out_path.empty() ? std::cout : s, only, g.timing);
      int failed = 0;
      for (const auto& r : results) failed += !r.pass;
      (g.out_path.empty() ? std::cout : s) << results.size() - failed << "/" << results.size() << " checks passed\n";
      if (!g.out_path.empty()) emit(g, s.str());
      return failed ? kAcceptance : kOk;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}
