#include "lapmap/cli.hpp"

#include "lapmap/entropy.hpp"
#include "lapmap/kneading.hpp"
#include "lapmap/map_io.hpp"
#include "lapmap/structure.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

namespace lapmap::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_decimal(v));
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void require_distinct(const std::vector<std::pair<std::string, std::string>>& paths) {
  std::vector<std::pair<std::string, fs::path>> seen;
  for (const auto& [flag, p] : paths) {
    if (p.empty()) continue;
    const auto canon = fs::weakly_canonical(fs::path(p));
    for (const auto& [other_flag, other] : seen) {
      if (other == canon) {
        throw ConfigError(flag + " and " + other_flag + " name the same file '" + p + "'");
      }
    }
    seen.emplace_back(flag, canon);
  }
}

void emit(const std::string& path, const std::string& contents, std::ostream& out) {
  if (path.empty()) {
    out << contents;
  } else {
    write_file_atomic(path, contents);
  }
}

// --- entropy ---------------------------------------------------------------

struct EntropyOptions {
  std::string map;
  std::size_t max_iter = 12;
  std::string out;
};

void run_entropy(const EntropyOptions& o, std::ostream& out) {
  require_distinct({{"--map", o.map}, {"--out", o.out}});
  const auto f = read_map_file(o.map);
  const auto seq = entropy_scan(f, o.max_iter);
  json rows = json::array();
  for (const auto& r : seq.rows) {
    rows.push_back({{"n", r.n},
                    {"laps", std::to_string(r.laps)},
                    {"log_laps_over_n", number(r.log_laps_over_n)},
                    {"variation", to_string(r.variation)},
                    {"log_var_over_n", number(r.log_var_over_n)}});
  }
  json report = {{"rows", rows},
                 {"h_upper", number(seq.h_upper)},
                 {"h_point", number(seq.h_point)},
                 {"h_variation", number(seq.h_variation)},
                 {"beta", number(seq.beta)},
                 {"r", number(seq.r)},
                 {"variation_growth", seq.variation_growth},
                 {"requested_n", seq.requested_n},
                 {"truncated", seq.truncated}};
  emit(o.out, dump(report), out);
  if (!o.out.empty()) {
    out << "h_point " << format_decimal(seq.h_point) << " h_variation "
        << format_decimal(seq.h_variation) << (seq.truncated ? " (truncated)" : "") << "\n";
  }
}

// --- linearize -------------------------------------------------------------

struct LinearizeOptions {
  std::string map;
  std::size_t grid = 1001;
  std::string terms = "auto";
  double tail_tol = 1e-6;
  std::size_t schedule_length = 8;
  std::optional<double> plateau_tol;
  std::string out;
  std::string model;
  std::string report;
};

void run_linearize(const LinearizeOptions& o, std::ostream& out) {
  require_distinct(
      {{"--map", o.map}, {"--out", o.out}, {"--model", o.model}, {"--report", o.report}});
  if (o.grid < 3) throw ConfigError("--grid must be at least 3");
  SeriesConfig cfg;
  cfg.tail_tolerance = o.tail_tol;
  cfg.schedule_length = o.schedule_length;
  if (o.terms != "auto") {
    std::size_t pos = 0;
    unsigned long n = 0;
    try {
      n = std::stoul(o.terms, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != o.terms.size() || n == 0) throw ConfigError("--terms must be 'auto' or a positive integer");
    cfg.terms = n;
  }
  const auto f = read_map_file(o.map);
  const auto grid = uniform_grid(f.a(), f.b(), o.grid);
  auto red = build_reduction(f, grid, cfg);
  if (o.plateau_tol) {
    if (!(*o.plateau_tol >= 0)) throw ConfigError("--plateau-tol must be non-negative");
    red.plateaus = detect_plateaus(red.x, red.psi, *o.plateau_tol);
  }

  std::string csv = "x,psi_x\n";
  for (std::size_t i = 0; i < red.x.size(); ++i) {
    csv += format_decimal(red.x[i]) + "," + format_decimal(red.psi[i]) + "\n";
  }
  json plateaus = json::array();
  for (const auto& p : red.plateaus) plateaus.push_back({number(p.lo), number(p.hi)});
  json defects = json::array();
  double worst_defect = 0;
  for (double d : red.slope_defects) {
    defects.push_back(number(d));
    worst_defect = std::max(worst_defect, std::fabs(d));
  }
  json schedule = json::array();
  for (double t : red.schedule) schedule.push_back(number(t));
  json report = {{"beta", number(red.growth.beta)},
                 {"r", number(red.growth.r)},
                 {"h", number(red.growth.h)},
                 {"growth_exact", red.growth.exact},
                 {"residual", number(red.residual)},
                 {"collapsed_laps", red.collapsed_laps},
                 {"plateaus", plateaus},
                 {"pre_clamp_violation", number(red.violation)},
                 {"slope_defects", defects},
                 {"max_slope_defect", number(worst_defect)},
                 {"tail_relative", number(red.tail_rel)},
                 {"t_schedule", schedule},
                 {"terms", red.terms},
                 {"grid", o.grid},
                 {"model_laps", red.g.lap_count()}};

  emit(o.out, csv, out);
  if (!o.model.empty()) {
    write_file_atomic(o.model, format_map(red.g, "uniformly piecewise linear model"));
  }
  if (!o.report.empty()) write_file_atomic(o.report, dump(report));
  if (!o.out.empty()) {
    out << "beta " << format_decimal(red.growth.beta) << " residual "
        << format_decimal(red.residual) << " plateaus " << red.plateaus.size() << "\n";
  }
}

// --- cycles / tent ---------------------------------------------------------

struct CyclesOptions {
  std::string beta;
  std::string out;
  std::size_t grid = 10'000;
  std::size_t steps = 200;
};

template <class Scalar>
json cycle_report(const TentSlope& beta, const CyclesOptions& o) {
  const auto C = transitive_cycle<Scalar>(beta);
  const auto u = tent(beta.value<Scalar>());
  const auto check = validate_cycle(u, C, ScalarTraits<Scalar>::tolerance());
  json comps = json::array();
  for (const auto& B : C.components) {
    json c = {{"lo_decimal", number(to_double(B.lo()))}, {"hi_decimal", number(to_double(B.hi()))}};
    if constexpr (ScalarTraits<Scalar>::exact) {
      c["lo"] = to_string(B.lo());
      c["hi"] = to_string(B.hi());
    }
    comps.push_back(std::move(c));
  }
  json report = {{"beta", beta.to_string()},
                 {"beta_decimal", number(beta.approx())},
                 {"exact", ScalarTraits<Scalar>::exact},
                 {"p", cycle_period_exponent(beta)},
                 {"period", C.period()},
                 {"components", comps},
                 {"valid", check.valid},
                 {"touching", check.touching},
                 {"escape_fraction", number(escape_fraction(u, C, o.grid, o.steps))},
                 {"escape_grid", o.grid},
                 {"escape_steps", o.steps}};
  if (beta.squared().compare(Rational(2)) <= 0) {
    const auto ren = renormalize<Scalar>(beta);
    json r = {{"c_decimal", number(to_double(ren.c))},
              {"d_decimal", number(to_double(ren.d))},
              {"new_beta", beta.squared().to_string()},
              {"defect", number(ren.defect)},
              {"samples", ren.samples}};
    if constexpr (ScalarTraits<Scalar>::exact) {
      r["c"] = to_string(ren.c);
      r["d"] = to_string(ren.d);
    }
    report["renormalization"] = r;
  }
  return report;
}

void run_cycles(const CyclesOptions& o, std::ostream& out) {
  require_distinct({{"--out", o.out}});
  if (o.grid < 2) throw ConfigError("--grid must be at least 2");
  const auto beta = TentSlope::parse(o.beta);
  const json report =
      beta.is_rational() ? cycle_report<Rational>(beta, o) : cycle_report<Real>(beta, o);
  emit(o.out, dump(report), out);
  if (!o.out.empty()) {
    out << "period " << report["period"].get<std::size_t>() << " escape_fraction "
        << format_decimal(report["escape_fraction"].get<double>()) << "\n";
  }
}

struct TentOptions {
  std::string beta;
  std::string out;
};

void run_tent(const TentOptions& o, std::ostream& out) {
  const auto beta = TentSlope::parse(o.beta);
  if (!beta.is_rational()) {
    throw DomainError("beta = " + beta.to_string() + " is irrational; map files hold exact rationals");
  }
  const auto u = tent(beta.value<Rational>());
  emit(o.out, format_map(u, "tent map, slope " + beta.to_string()), out);
}

// --- verify ----------------------------------------------------------------

struct VerifyOptions {
  std::string map;
  std::string psi;
  std::string model;
  double tol = 1e-3;
};

struct Samples {
  std::vector<double> x;
  std::vector<double> y;
};

Samples read_samples(const std::string& path) {
  std::istringstream in(read_text_file(path));
  Samples s;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.find_first_of("0123456789") != 0 && line.front() != '-') continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("no comma");
      std::size_t used = 0;
      const double x = std::stod(line.substr(0, comma), &used);
      const std::string rest = line.substr(comma + 1);
      std::size_t used_y = 0;
      const double y = std::stod(rest, &used_y);
      if (used_y != rest.size()) throw std::invalid_argument("trailing text");
      s.x.push_back(x);
      s.y.push_back(y);
    } catch (const std::exception&) {
      throw ParseError(path + ": line " + std::to_string(line_no) + ": expected '<x>,<psi_x>'");
    }
  }
  if (s.x.size() < 2) throw ParseError(path + ": need at least two samples");
  for (std::size_t i = 1; i < s.x.size(); ++i) {
    if (!(s.x[i - 1] < s.x[i])) throw ParseError(path + ": x column must increase strictly");
  }
  return s;
}

double interpolate(const Samples& s, double x) {
  if (x <= s.x.front()) return s.y.front();
  if (x >= s.x.back()) return s.y.back();
  const auto it = std::upper_bound(s.x.begin(), s.x.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - s.x.begin());
  const double w = (x - s.x[k - 1]) / (s.x[k] - s.x[k - 1]);
  return s.y[k - 1] + w * (s.y[k] - s.y[k - 1]);
}

int run_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  if (!(o.tol >= 0)) throw ConfigError("--tol must be non-negative");
  const auto f = read_map_file(o.map);
  const auto g = read_map_file(o.model);
  const auto psi = read_samples(o.psi);
  const double ga = to_double(g.a());
  const double gb = to_double(g.b());
  const double fa = to_double(f.a());
  const double fb = to_double(f.b());
  double residual = 0;
  for (std::size_t i = 0; i < psi.x.size(); ++i) {
    const double x = std::clamp(psi.x[i], fa, fb);
    const double lhs = interpolate(psi, eval_approx(f, x));
    const double rhs = eval_approx(g, std::clamp(psi.y[i], ga, gb));
    residual = std::max(residual, std::fabs(lhs - rhs));
  }
  out << "residual " << format_decimal(residual) << "\n";
  if (residual > o.tol) {
    err << "ERROR verify: residual " << format_decimal(residual) << " exceeds tolerance "
        << format_decimal(o.tol) << "\n";
    return kVerifyFailed;
  }
  return kOk;
}

int status_for(const Error& e) {
  const std::string& code = e.code();
  if (code == "config") return kConfig;
  if (code == "parse") return kParse;
  if (code == "invariant") return kInvariant;
  if (code == "domain") return kDomain;
  if (code == "resource") return kResource;
  if (code == "unsupported") return kUnsupported;
  if (code == "io") return kIo;
  return kInternal;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lap counts, entropy and piecewise linear models of interval maps", "lapmap"};
  app.require_subcommand(1);
  unsigned precision = 128;
  app.add_option("--precision", precision, "Working precision in bits for irrational slopes")
      ->check(CLI::Range(24u, 100000u));

  EntropyOptions eo;
  auto* entropy = app.add_subcommand("entropy", "Lap counts and variation of f^1..f^N");
  entropy->add_option("--map", eo.map, "Input map file")->required();
  entropy->add_option("--max-iter", eo.max_iter, "Largest iterate N")->check(CLI::Range(2, 100000));
  entropy->add_option("--out", eo.out, "Report JSON (stdout if omitted)");

  LinearizeOptions lo;
  auto* linearize = app.add_subcommand("linearize", "Increasing semi-conjugacy to a uniformly piecewise linear model");
  linearize->add_option("--map", lo.map, "Input map file")->required();
  linearize->add_option("--grid", lo.grid, "Number of grid points")->check(CLI::Range(3, 1'000'000));
  linearize->add_option("--terms", lo.terms, "Truncation order or 'auto'");
  linearize->add_option("--tail-tol", lo.tail_tol, "Relative tail tolerance");
  linearize->add_option("--schedule-length", lo.schedule_length, "Number of t values approaching r")
      ->check(CLI::Range(1, 52));
  linearize->add_option("--plateau-tol", lo.plateau_tol, "Plateau threshold on psi increase");
  linearize->add_option("--out", lo.out, "psi samples CSV (stdout if omitted)");
  linearize->add_option("--model", lo.model, "Model map file");
  linearize->add_option("--report", lo.report, "Report JSON");

  CyclesOptions co;
  auto* cycles = app.add_subcommand("cycles", "Transitive cycle of the tent map u_beta");
  cycles->add_option("--beta", co.beta, "Slope: p/q, decimal, or sqrt(...)")->required();
  cycles->add_option("--out", co.out, "Report JSON (stdout if omitted)");
  cycles->add_option("--grid", co.grid, "Escape-fraction grid size");
  cycles->add_option("--steps", co.steps, "Escape-fraction iteration limit");

  TentOptions to;
  auto* tent_cmd = app.add_subcommand("tent", "Write the tent map u_beta");
  tent_cmd->add_option("--beta", to.beta, "Rational slope in (0,2]")->required();
  tent_cmd->add_option("--out", to.out, "Map file (stdout if omitted)");

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "Check psi(f(x)) = g(psi(x)) on sampled psi");
  verify->add_option("--map", vo.map, "Map f")->required();
  verify->add_option("--psi", vo.psi, "psi samples CSV")->required();
  verify->add_option("--model", vo.model, "Model map g")->required();
  verify->add_option("--tol", vo.tol, "Largest accepted residual");

  for (auto* sub : {entropy, linearize, cycles, tent_cmd, verify}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "ERROR usage: " << one_line(e.what()) << "\n";
    return kUsage;
  }

  try {
    set_real_precision(precision);
    if (*entropy) run_entropy(eo, out);
    if (*linearize) run_linearize(lo, out);
    if (*cycles) run_cycles(co, out);
    if (*tent_cmd) run_tent(to, out);
    if (*verify) return run_verify(vo, out, err);
    return kOk;
  } catch (const Error& e) {
    err << "ERROR " << e.code() << ": " << one_line(e.what()) << "\n";
    return status_for(e);
  } catch (const std::exception& e) {
    err << "ERROR internal: " << one_line(e.what()) << "\n";
    return kInternal;
  }
}

}  // namespace lapmap::cli
