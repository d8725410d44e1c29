// scsa: analyze pulse-shaped signals through the discrete spectrum of an
// associated Schrodinger operator. CSV in, JSON report + CSV tables out.
//
// Exit codes: 0 ok, 2 input/validation error, 3 solver failure,
// 4 internal-consistency (proposition) alarm, 5 target count unreachable.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "scsa/scsa.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using scsa::Index;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;
constexpr int kExitProposition = 4;
constexpr int kExitTarget = 5;

struct ExitRequest {
  int code;
  std::string message;
};

struct CommonOpts {
  std::string input;
  bool baseline_shift = false;
  double decay_threshold = 0.01;
  std::optional<double> dx;
  double x0 = 0.0;
  std::optional<double> negativity_threshold;
  int oversample = 16;
  int max_solver_iterations = 50;
  std::string out;
  std::string recon_out;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o, bool need_input = true) {
  auto* in = cmd->add_option("--input", o.input, "input signal CSV (x,y columns or one y column)");
  if (need_input) in->required();
  cmd->add_flag("--baseline-shift", o.baseline_shift,
                "subtract the global minimum before validating");
  cmd->add_option("--decay-threshold", o.decay_threshold,
                  "endpoint decay check level, fraction of y_max")
      ->default_val(0.01);
  cmd->add_option("--dx", o.dx, "grid spacing for single-column CSV input");
  cmd->add_option("--x0", o.x0, "first abscissa for single-column CSV input")->default_val(0.0);
  cmd->add_option("--negativity-threshold", o.negativity_threshold,
                  "discard eigenvalues above minus this (default: scale-aware)");
  cmd->add_option("--oversample", o.oversample,
                  "internal solver-grid refinement factor (1 disables)")
      ->default_val(16)
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-solver-iterations", o.max_solver_iterations,
                  "inverse-iteration cap per eigenpair")
      ->default_val(50);
  cmd->add_option("--out", o.out, "write the report here instead of stdout");
  cmd->add_option("--recon-out", o.recon_out, "write the reconstruction CSV here");
}

unsigned threads_from_env() {
  const char* v = std::getenv("SCSA_THREADS");
  if (!v || !*v) return 0;
  int n = 0;
  auto [p, ec] = std::from_chars(v, v + std::string_view(v).size(), n);
  if (ec != std::errc() || *p != '\0' || n < 0)
    throw ExitRequest{kExitInput, std::string("SCSA_THREADS must be a nonnegative integer, got '") +
                                      v + "'"};
  return unsigned(n);
}

scsa::AnalysisOptions<double> analysis_options(const CommonOpts& o) {
  scsa::AnalysisOptions<double> opts;
  opts.solver.negativity_threshold = o.negativity_threshold;
  opts.solver.max_inverse_iterations = o.max_solver_iterations;
  opts.solver.threads = threads_from_env();
  opts.oversample = o.oversample;
  return opts;
}

scsa::Signal<double> load_signal(const CommonOpts& o) {
  scsa::CsvOptions copts;
  copts.dx = o.dx;
  copts.x0 = o.x0;
  scsa::Signal<double> s = scsa::read_signal_csv<double>(fs::path(o.input), copts);
  if (o.baseline_shift) s = scsa::baseline_shift(s);
  const auto rep = scsa::validate(s, o.decay_threshold);
  if (!rep.nonnegative)
    throw ExitRequest{kExitInput,
                      "validation failed: the signal violates the nonnegativity hypothesis "
                      "(min sample = " +
                          std::to_string(rep.min_value) +
                          "); rerun with --baseline-shift to precondition"};
  if (!rep.decay_ok)
    throw ExitRequest{kExitInput,
                      "validation failed: the signal does not decay at the window endpoints "
                      "(threshold " +
                          std::to_string(rep.decay_threshold) +
                          " of y_max); widen the window or raise --decay-threshold"};
  return s;
}

json report_json(const CommonOpts& o, const scsa::Signal<double>& s,
                 const scsa::ScsaResult<double>& r) {
  json j;
  j["scsa_report_version"] = 1;
  j["input"] = {{"path", o.input},
                {"m", s.size()},
                {"dx", s.dx},
                {"x0", s.x0},
                {"y_max", scsa::y_max(s)}};
  j["parameters"] = {
      {"chi", r.chi},
      {"baseline_shift", o.baseline_shift},
      {"decay_threshold", o.decay_threshold},
      {"negativity_threshold",
       o.negativity_threshold ? json(*o.negativity_threshold) : json(nullptr)},
      {"oversample", o.oversample},
      {"max_solver_iterations", o.max_solver_iterations}};
  std::vector<double> kappas(r.kappas.begin(), r.kappas.end());
  std::vector<double> ksq;
  for (double k : kappas) ksq.push_back(k * k / r.chi);
  std::vector<double> moms(r.momentums.begin(), r.momentums.end());
  j["results"] = {{"n_chi", r.n_chi},
                  {"kappas", kappas},
                  {"kappas_squared_over_chi", ksq},
                  {"momentums", moms},
                  {"relative_l2_error", r.relative_l2_error},
                  {"max_abs_error", r.max_abs_error}};
  j["solver"] = {{"max_residual", r.max_residual}, {"warnings", r.warnings}};
  return j;
}

void emit_report(const CommonOpts& o, const json& j, const scsa::ScsaResult<double>& r) {
  if (o.out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream os(o.out);
    if (!os) throw ExitRequest{kExitInput, "cannot open " + o.out + " for writing"};
    os << j.dump(2) << "\n";
  }
  std::string recon = o.recon_out;
  if (recon.empty() && !o.out.empty())
    recon = (fs::path(o.out).parent_path() / fs::path(o.out).stem()).string() +
            ".reconstruction.csv";
  if (!recon.empty()) scsa::write_signal_csv(fs::path(recon), r.reconstruction);
}

int cmd_analyze(const CommonOpts& o, double chi) {
  const auto s = load_signal(o);
  const auto r = scsa::analyze(s, chi, analysis_options(o));
  emit_report(o, report_json(o, s, r), r);
  return kExitOk;
}

int cmd_sweep(const CommonOpts& o, double chi_min, double chi_max, int steps) {
  if (!(chi_min > 0) || !(chi_min < chi_max))
    throw ExitRequest{kExitInput, "sweep needs 0 < --chi-min < --chi-max"};
  const auto s = load_signal(o);
  scsa::ChiSweep<double> sweep;
  const double ratio = chi_max / chi_min;
  for (int k = 0; k < steps; ++k)
    sweep.chi_values.push_back(chi_min * std::pow(ratio, double(k) / double(steps - 1)));
  const auto sel = scsa::select_chi(s, scsa::ChiPolicy<double>(sweep), analysis_options(o));

  std::ostringstream table;
  table << "chi,n_chi,relative_l2_error,m1,m2,m3\n";
  for (const auto& r : sel.sweep) {
    char buf[32];
    auto put = [&](double v, char sep) {
      auto res = std::to_chars(buf, buf + sizeof(buf), v);
      table.write(buf, res.ptr - buf);
      table << sep;
    };
    put(r.chi, ',');
    table << r.n_chi << ',';
    put(r.relative_l2_error, ',');
    put(r.momentums(0), ',');
    put(r.momentums(1), ',');
    put(r.momentums(2), '\n');
  }
  if (o.out.empty()) {
    std::cout << table.str();
  } else {
    std::ofstream os(o.out);
    if (!os) throw ExitRequest{kExitInput, "cannot open " + o.out + " for writing"};
    os << table.str();
  }
  return kExitOk;
}

int cmd_target_n(const CommonOpts& o, int n, double chi_min, double chi_max, int max_iters) {
  if (n < 1) throw ExitRequest{kExitInput, "--n must be >= 1"};
  if (!(chi_min > 0) || !(chi_min < chi_max))
    throw ExitRequest{kExitInput, "target-n needs 0 < --chi-min < --chi-max"};
  const auto s = load_signal(o);
  const auto sel = scsa::select_chi(
      s, scsa::ChiPolicy<double>(scsa::TargetCount<double>{n, chi_min, chi_max, max_iters}),
      analysis_options(o));
  json j = report_json(o, s, sel.result);
  json trace = json::array();
  for (const auto& t : sel.trace) {
    json row = {{"chi", t.chi}, {"n_chi", t.n_chi}};
    if (t.relative_l2_error) row["relative_l2_error"] = *t.relative_l2_error;
    trace.push_back(row);
  }
  j["target"] = {{"n", n}, {"attained", sel.attained}, {"chi", sel.chi}, {"trace", trace}};
  emit_report(o, j, sel.result);
  return kExitOk;
}

/// Rebuild an analysis from a serialized report, re-checking its invariants.
struct ReportData {
  CommonOpts opts;
  double chi;
};

ReportData parse_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ExitRequest{kExitInput, "cannot open report " + path};
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ExitRequest{kExitInput, std::string("malformed report: ") + e.what()};
  }
  try {
    ReportData d;
    const auto& in_j = j.at("input");
    const auto& par = j.at("parameters");
    const auto& res = j.at("results");
    d.opts.input = in_j.at("path").get<std::string>();
    d.chi = par.at("chi").get<double>();
    d.opts.baseline_shift = par.at("baseline_shift").get<bool>();
    d.opts.decay_threshold = par.at("decay_threshold").get<double>();
    if (!par.at("negativity_threshold").is_null())
      d.opts.negativity_threshold = par.at("negativity_threshold").get<double>();
    d.opts.oversample = par.at("oversample").get<int>();
    d.opts.max_solver_iterations = par.at("max_solver_iterations").get<int>();

    // consistency alarm: every kappa^2/chi must sit inside the well
    const double ymax = in_j.at("y_max").get<double>();
    for (const auto& v : res.at("kappas_squared_over_chi")) {
      const double k2 = v.get<double>();
      if (k2 > ymax * (1.0 + 1e-9))
        throw ExitRequest{kExitProposition,
                          "report fails the spectrum bound: kappa^2/chi = " + std::to_string(k2) +
                              " exceeds y_max = " + std::to_string(ymax)};
    }
    return d;
  } catch (const json::exception& e) {
    throw ExitRequest{kExitInput, std::string("malformed report: ") + e.what()};
  }
}

int cmd_plotdata(const ReportData& d, const std::string& out, const std::string& svg) {
  if (out.empty() && svg.empty())
    throw ExitRequest{kExitInput, "plotdata needs --out and/or --svg"};
  const auto s = load_signal(d.opts);
  const auto r = scsa::analyze(s, d.chi, analysis_options(d.opts));

  if (!out.empty()) {
    std::ofstream overlay(out + ".overlay.csv");
    if (!overlay) throw ExitRequest{kExitInput, "cannot open " + out + ".overlay.csv"};
    overlay << "x,y,y_chi\n";
    char buf[32];
    auto put = [&](std::ostream& os, double v, char sep) {
      auto res = std::to_chars(buf, buf + sizeof(buf), v);
      os.write(buf, res.ptr - buf);
      os << sep;
    };
    for (Index i = 0; i < s.size(); ++i) {
      put(overlay, s.x(i), ',');
      put(overlay, s.samples(i), ',');
      put(overlay, r.reconstruction.samples(i), '\n');
    }

    std::ofstream well(out + ".well.csv");
    if (!well) throw ExitRequest{kExitInput, "cannot open " + out + ".well.csv"};
    well << "kind,x,value\n";
    for (Index i = 0; i < s.size(); ++i) {
      well << "well,";
      put(well, s.x(i), ',');
      put(well, -s.samples(i), '\n');
    }
    for (Index nidx = 0; nidx < r.kappas.size(); ++nidx) {
      well << "level," << (nidx + 1) << ',';
      put(well, -r.kappas(nidx) * r.kappas(nidx) / r.chi, '\n');
    }
  }

  if (!svg.empty()) {
    svgplot::Panel overlay_panel;
    overlay_panel.title = "signal and reconstruction (chi = " + std::to_string(d.chi) + ")";
    svgplot::Series sy, sr;
    for (Index i = 0; i < s.size(); ++i) {
      sy.x.push_back(s.x(i));
      sy.y.push_back(s.samples(i));
      sr.x.push_back(s.x(i));
      sr.y.push_back(r.reconstruction.samples(i));
    }
    sr.color = "darkorange";
    sr.dashed = true;
    overlay_panel.series = {sy, sr};

    svgplot::Panel well_panel;
    well_panel.title = "potential well and eigenvalue levels";
    svgplot::Series sw;
    for (Index i = 0; i < s.size(); ++i) {
      sw.x.push_back(s.x(i));
      sw.y.push_back(-s.samples(i));
    }
    well_panel.series = {sw};
    for (Index nidx = 0; nidx < r.kappas.size(); ++nidx) {
      const double level = -r.kappas(nidx) * r.kappas(nidx) / r.chi;
      // draw each level between its classical turning points
      double lo = s.x(0), hi = s.x(s.size() - 1);
      for (Index i = 0; i < s.size(); ++i)
        if (-s.samples(i) <= level) {
          lo = s.x(i);
          break;
        }
      for (Index i = s.size() - 1; i >= 0; --i)
        if (-s.samples(i) <= level) {
          hi = s.x(i);
          break;
        }
      well_panel.levels.push_back({lo, hi, level});
    }

    std::ofstream os(svg);
    if (!os) throw ExitRequest{kExitInput, "cannot open " + svg + " for writing"};
    svgplot::render(os, {overlay_panel, well_panel});
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"semi-classical signal analysis: represent a nonnegative pulse by the discrete "
               "spectrum of -d^2/dx^2 - chi*y and rebuild it from squared eigenfunctions"};
  app.require_subcommand(1);

  std::function<int()> action;

  CommonOpts an_opts;
  double an_chi = 0;
  auto* an = app.add_subcommand("analyze", "run one analysis at a fixed chi");
  add_common_flags(an, an_opts);
  an->add_option("--chi", an_chi, "semiclassical parameter chi > 0")->required();
  an->callback([&] { action = [&] { return cmd_analyze(an_opts, an_chi); }; });

  CommonOpts sw_opts;
  double sw_min = 0, sw_max = 0;
  int sw_steps = 0;
  auto* sw = app.add_subcommand("sweep", "geometric chi sweep; emits a chi/count/error table");
  add_common_flags(sw, sw_opts);
  sw->add_option("--chi-min", sw_min)->required();
  sw->add_option("--chi-max", sw_max)->required();
  sw->add_option("--steps", sw_steps, "number of sweep points")->required()->check(CLI::Range(2, 10000));
  sw->callback([&] { action = [&] { return cmd_sweep(sw_opts, sw_min, sw_max, sw_steps); }; });

  CommonOpts tn_opts;
  int tn_n = 0, tn_iters = 80;
  double tn_min = 0, tn_max = 0;
  auto* tn = app.add_subcommand("target-n", "find the smallest chi with a given eigenvalue count");
  add_common_flags(tn, tn_opts);
  tn->add_option("--n", tn_n, "target number of negative eigenvalues")->required();
  tn->add_option("--chi-min", tn_min)->required();
  tn->add_option("--chi-max", tn_max)->required();
  tn->add_option("--max-iters", tn_iters, "bisection probe cap")->default_val(80);
  tn->callback(
      [&] { action = [&] { return cmd_target_n(tn_opts, tn_n, tn_min, tn_max, tn_iters); }; });

  CommonOpts pd_opts;
  std::string pd_report, pd_out, pd_svg;
  double pd_chi = 0;
  auto* pd = app.add_subcommand("plotdata",
                                "emit overlay and well-plot tables (and optionally an SVG)");
  add_common_flags(pd, pd_opts, /*need_input=*/false);
  pd->add_option("--report", pd_report, "JSON report from analyze/target-n to replot");
  pd->add_option("--chi", pd_chi, "chi for inline analysis (with --input)");
  pd->add_option("--svg", pd_svg, "also render a minimal SVG here");
  pd->callback([&] {
    action = [&] {
      ReportData d;
      if (!pd_report.empty()) {
        d = parse_report(pd_report);
      } else {
        if (pd_opts.input.empty() || !(pd_chi > 0))
          throw ExitRequest{kExitInput, "plotdata needs --report, or --input together with --chi"};
        d.opts = pd_opts;
        d.chi = pd_chi;
      }
      // --out here is the base path for the two tables
      return cmd_plotdata(d, pd_opts.out, pd_svg);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    return action();
  } catch (const ExitRequest& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const scsa::TargetUnreachable& e) {
    std::cerr << "error: " << e.what() << "\nbest bracket: chi in [" << e.chi_lo << ", " << e.chi_hi
              << "] with counts [" << e.n_lo << ", " << e.n_hi << "]; closest tested chi "
              << e.best_chi << " gives " << e.best_n << "\n";
    return kExitTarget;
  } catch (const scsa::PropositionViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProposition;
  } catch (const scsa::ConvergenceFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const scsa::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}
