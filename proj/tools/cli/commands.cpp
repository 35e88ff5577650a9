#include "commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <numbers>
#include <sstream>

#include "matrix_file.hpp"
#include "prstab/gaussian.hpp"
#include "prstab/harmonic.hpp"
#include "prstab/parallel.hpp"
#include "prstab/recovery.hpp"
#include "prstab/rng.hpp"
#include "prstab/stability.hpp"

namespace prstab::cli {

namespace {

using nlohmann::json;

// Stream purposes for CLI-level draws; library modules use 1..5.
constexpr std::uint64_t kRecoverMatrixStream = 10;
constexpr std::uint64_t kRecoverTruthStream = 11;
constexpr std::uint64_t kRecoverNoiseStream = 12;

Field parse_field(const std::string& s) {
  if (s == "real") return Field::Real;
  if (s == "complex") return Field::Complex;
  throw PreconditionError("field must be 'real' or 'complex', got '" + s + "'");
}

json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json vector_json(const Vector& v) {
  json arr = json::array();
  for (const auto& e : v.entries()) {
    if (v.field() == Field::Real) {
      arr.push_back(e.real());
    } else {
      arr.push_back(json::array({e.real(), e.imag()}));
    }
  }
  return arr;
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string line;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) line += ',';
    line += c;
    first = false;
  }
  line += '\n';
  return line;
}

std::string fmt(double v) { return format_double(v); }

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace

int cmd_analyze(const AnalyzeArgs& args, unsigned threads) {
  return guarded([&] {
    const auto a = read_matrix_file(args.matrix);
    LowerMethod method;
    if (args.method == "exact") {
      if (a.field() == Field::Complex) {
        throw PreconditionError("the exact method supports real matrices only; use --method numeric for complex input");
      }
      method = LowerMethod::ExactRealSubset;
    } else if (args.method == "numeric") {
      method = LowerMethod::NumericOrthPair;
    } else if (args.method == "auto") {
      method = a.field() == Field::Real && a.rows() <= 24 ? LowerMethod::ExactRealSubset : LowerMethod::NumericOrthPair;
    } else {
      throw PreconditionError("method must be exact, numeric or auto");
    }
    if (args.restarts < 1) throw PreconditionError("--restarts must be at least 1");

    AnalysisOptions opts;
    opts.enumeration.threads = threads;
    opts.numeric.restarts = args.restarts;
    opts.numeric.seed = args.seed;
    opts.numeric.threads = threads;
    const auto rep = condition_number(a, method, opts);

    json cert;
    if (const auto* s = std::get_if<SubsetCertificate>(&rep.certificate)) {
      cert["subset"] = s->subset;
    } else {
      const auto& p = std::get<PairCertificate>(rep.certificate);
      cert["pair"] = {{"x", vector_json(p.x)}, {"y", vector_json(p.y)}, {"scale", p.scale},
                      {"restart", p.restart}, {"evaluations", p.evaluations}, {"converged", p.converged}};
    }
    json bounds;
    bounds["beta0"] = universal_lower_bound(a.field());
    bounds["real_md_bound"] =
        (a.field() == Field::Real && a.rows() >= 3) ? json(real_md_lower_bound(static_cast<int>(a.rows()))) : json(nullptr);

    json report;
    report["upper"] = rep.upper;
    report["lower"] = rep.lower;
    report["beta"] = number_or_inf(rep.beta);
    report["method"] = std::string(to_string(rep.method));
    report["certificate"] = cert;
    report["bounds"] = bounds;
    report["field"] = std::string(to_string(a.field()));
    report["m"] = a.rows();
    report["d"] = a.cols();
    report["tool_version"] = kToolVersion;
    report["seed"] = args.seed;
    write_output(args.json, report.dump(2) + "\n");
    return static_cast<int>(kOk);
  });
}

int cmd_harmonic(const HarmonicArgs& args, unsigned threads) {
  return guarded([&] {
    const auto sep = args.m_range.find("..");
    if (sep == std::string::npos) throw PreconditionError("--m-range must look like A..B");
    int lo = 0, hi = 0;
    try {
      std::size_t used = 0;
      const std::string a = args.m_range.substr(0, sep), b = args.m_range.substr(sep + 2);
      lo = std::stoi(a, &used);
      if (used != a.size()) throw std::invalid_argument("range");
      hi = std::stoi(b, &used);
      if (used != b.size()) throw std::invalid_argument("range");
    } catch (const std::logic_error&) {
      throw PreconditionError("--m-range must look like A..B with integers A, B");
    }
    if (lo < 3 || hi < lo) throw PreconditionError("--m-range needs 3 <= A <= B");
    if (args.exact_max > 24) throw PreconditionError("--exact-max cannot exceed the enumeration cap of 24");

    std::string out = csv_line({"m", "beta_closed", "beta_exact", "md_lower_bound", "g_max", "theta_star"});
    EnumerationOptions eo;
    eo.threads = threads;
    for (int m = lo; m <= hi; ++m) {
      const auto frame = harmonic_frame(m);
      std::string exact;
      if (m <= args.exact_max) {
        const auto rep = condition_number(frame.matrix, LowerMethod::ExactRealSubset, {eo, {}, 1e-10});
        exact = fmt(rep.beta);
      }
      const auto gmax = g_m_max(m);
      out += csv_line({std::to_string(m), fmt(harmonic_beta(m)), exact, fmt(real_md_lower_bound(m)), fmt(gmax.value),
                       fmt(gmax.theta)});
    }
    write_output(args.csv, out);
    return static_cast<int>(kOk);
  });
}

int cmd_gaussian(const GaussianArgs& args, unsigned threads) {
  return guarded([&] {
    GaussianExperiment cfg;
    cfg.field = parse_field(args.field);
    cfg.d = args.d;
    cfg.m_values = args.m_values;
    cfg.trials = args.trials;
    cfg.seed = args.seed;
    cfg.restarts = args.restarts;
    cfg.threads = threads;
    if (cfg.restarts < 0) throw PreconditionError("--restarts must be non-negative");
    const auto rows = gaussian_beta_experiment(cfg);
    std::string out = csv_line({"m", "trial", "U_hat", "L_hat", "beta_hat", "beta_0", "excess"});
    for (const auto& r : rows) {
      out += csv_line({std::to_string(r.m), std::to_string(r.trial), fmt(r.upper), fmt(r.lower), fmt(r.beta),
                       fmt(r.beta0), fmt(r.excess)});
    }
    write_output(args.csv, out);
    return static_cast<int>(kOk);
  });
}

int cmd_kernel(const KernelArgs& args, unsigned threads) {
  return guarded([&] {
    const Field field = parse_field(args.field);
    if (args.grid < 2) throw PreconditionError("--grid must be at least 2");
    if (args.mc_samples < 1000) throw PreconditionError("--mc-samples must be at least 1000");
    std::string out = csv_line({"theta", "closed_form", "mc_estimate", "mc_se", "bound"});
    for (int k = 0; k < args.grid; ++k) {
      const double theta = 0.5 * std::numbers::pi * k / (args.grid - 1);
      const double closed = field == Field::Real ? kernel_expectation_real(theta) : kernel_expectation_complex(theta);
      const auto mc = mc_kernel_expectation(field, theta, args.mc_samples, args.seed, threads);
      const double bound = kernel_expectation_bound(field, theta);
      if (std::abs(closed - mc.estimate) > 4.0 * mc.standard_error) {
        std::cerr << "warning: theta=" << fmt(theta) << " Monte Carlo differs from the closed form by more than 4 SE\n";
      }
      if (closed > bound + 1e-8) std::cerr << "warning: theta=" << fmt(theta) << " closed form exceeds the bound\n";
      out += csv_line({fmt(theta), fmt(closed), fmt(mc.estimate), fmt(mc.standard_error), fmt(bound)});
    }
    write_output(args.csv, out);
    return static_cast<int>(kOk);
  });
}

int cmd_recover(const RecoverArgs& args, unsigned threads) {
  return guarded([&] {
    if (!(args.delta > 0.0 && args.delta <= 0.05)) throw PreconditionError("--delta must lie in (0, 0.05]");
    if (args.trials < 1) throw PreconditionError("--trials must be at least 1");
    if (!(args.noise >= 0.0)) throw PreconditionError("--noise must be non-negative");
    if (args.matrix.empty() == args.gaussian.empty()) {
      throw PreconditionError("give exactly one of --matrix PATH or --gaussian m,d");
    }
    const Field field = parse_field(args.field);

    std::optional<MeasurementMatrix> fixed;
    std::size_t gm = 0, gd = 0;
    if (!args.matrix.empty()) {
      fixed = read_matrix_file(args.matrix);
    } else {
      const auto comma = args.gaussian.find(',');
      try {
        if (comma == std::string::npos) throw std::invalid_argument("shape");
        gm = std::stoul(args.gaussian.substr(0, comma));
        gd = std::stoul(args.gaussian.substr(comma + 1));
      } catch (const std::logic_error&) {
        throw PreconditionError("--gaussian must look like m,d");
      }
      if (gm < 1 || gd < 1) throw PreconditionError("--gaussian needs m, d >= 1");
    }

    struct TrialRow {
      RecoveryResult result;
      ErrorBoundCheck check;
    };
    const std::size_t trials = static_cast<std::size_t>(args.trials);
    std::vector<TrialRow> rows(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
      const auto a = fixed ? *fixed : sample_gaussian_matrix(gm, gd, field, args.seed, stream_id(kRecoverMatrixStream, t));
      const auto x0 = sample_gaussian_vector(a.cols(), a.field(), args.seed, stream_id(kRecoverTruthStream, t));
      const auto clean = phaseless_map(a, x0);
      double clean_norm = 0.0;
      for (const double v : clean) clean_norm += v * v;
      clean_norm = std::sqrt(clean_norm);
      CounterRng rng(args.seed, stream_id(kRecoverNoiseStream, t));
      std::vector<double> eta(a.rows());
      double gn = 0.0;
      for (auto& e : eta) {
        e = rng.normal();
        gn += e * e;
      }
      gn = std::sqrt(gn);
      for (auto& e : eta) e = gn > 0.0 ? e * args.noise * clean_norm / gn : 0.0;

      const auto problem = RecoveryProblem::with_truth(a, x0, std::move(eta));
      RecoveryOptions ro;
      ro.restarts = args.restarts;
      ro.seed = CounterRng::mix(args.seed ^ t);
      ro.threads = 1;
      rows[t].result = solve_quadratic_model(problem, ro);
      rows[t].check = check_error_bound(rows[t].result, problem, args.delta);
    });

    std::string out = csv_line({"trial", "residual", "certified", "dist", "bound", "holds"});
    std::size_t certified = 0, holds = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto& r = rows[t];
      if (r.result.certified) {
        ++certified;
        if (r.check.holds) ++holds;
      }
      out += csv_line({std::to_string(t), fmt(r.result.residual), r.result.certified ? "1" : "0", fmt(r.check.achieved),
                       fmt(r.check.bound), r.check.holds ? "1" : "0"});
    }
    write_output(args.csv, out);
    std::ostringstream summary;
    summary << "certified " << certified << "/" << trials << "; bound holds on " << holds << "/" << certified
            << " certified trials (rate " << (certified ? fmt(static_cast<double>(holds) / certified) : "nan") << ")\n";
    (args.csv.empty() ? std::cerr : std::cout) << summary.str();
    return static_cast<int>(kOk);
  });
}

int cmd_optimize(const OptimizeArgs& args, unsigned threads) {
  return guarded([&] {
    if (args.m < 3 || args.m > 16) throw PreconditionError("--m must lie in [3, 16]");
    if (args.restarts < 1) throw PreconditionError("--restarts must be at least 1");
    if (args.budget < 1) throw PreconditionError("--budget must be positive");
    FrameOptions fo;
    fo.restarts = args.restarts;
    fo.seed = args.seed;
    fo.budget = args.budget;
    fo.threads = threads;
    const auto best = optimize_frame_r2(args.m, fo);
    const double harmonic = harmonic_beta(args.m);
    json doc;
    doc["m"] = args.m;
    doc["beta_best"] = number_or_inf(best.beta);
    doc["beta_harmonic"] = harmonic;
    doc["md_lower_bound"] = real_md_lower_bound(args.m);
    doc["improved"] = best.beta < harmonic - 1e-6;
    doc["frame"] = {{"radii", best.frame.radii}, {"angles", best.frame.angles}};
    doc["best_restart"] = best.best_restart;
    doc["evaluations"] = best.evaluations;
    doc["restarts"] = args.restarts;
    doc["tool_version"] = kToolVersion;
    doc["seed"] = args.seed;
    write_output(args.json, doc.dump(2) + "\n");
    return static_cast<int>(kOk);
  });
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Stability analysis of phaseless measurement maps x -> |Ax|", "prstab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  unsigned threads = 0;
  if (const char* env = std::getenv("PRSTAB_THREADS")) {
    try {
      threads = static_cast<unsigned>(std::stoul(env));
    } catch (const std::logic_error&) {
      std::cerr << "error: PRSTAB_THREADS must be a non-negative integer\n";
      return kConfigError;
    }
  }
  app.add_option("--threads", threads, "Worker threads (0 = all logical cores)");

  AnalyzeArgs analyze;
  auto* sa = app.add_subcommand("analyze", "Optimal Lipschitz bounds and condition number of a matrix file");
  sa->add_option("--matrix", analyze.matrix, "Matrix file")->required();
  sa->add_option("--method", analyze.method, "exact | numeric | auto")->check(CLI::IsMember({"exact", "numeric", "auto"}));
  sa->add_option("--restarts", analyze.restarts, "Numeric restarts");
  sa->add_option("--seed", analyze.seed, "Seed for the numeric method");
  sa->add_option("--json", analyze.json, "Report path (stdout if omitted)");

  HarmonicArgs harmonic;
  auto* sh = app.add_subcommand("harmonic", "Closed-form and enumerated constants of harmonic frames");
  sh->add_option("--m-range", harmonic.m_range, "Range A..B");
  sh->add_option("--exact-max", harmonic.exact_max, "Largest m with an enumerated beta_exact column");
  sh->add_option("--csv", harmonic.csv, "CSV path (stdout if omitted)");

  GaussianArgs gaussian;
  auto* sg = app.add_subcommand("gaussian", "Condition numbers of Gaussian matrices");
  sg->add_option("--field", gaussian.field, "real | complex");
  sg->add_option("--d", gaussian.d, "Signal dimension");
  sg->add_option("--m", gaussian.m_values, "Comma-separated, strictly increasing m values")->delimiter(',')->required();
  sg->add_option("--trials", gaussian.trials, "Trials per m");
  sg->add_option("--seed", gaussian.seed, "Seed");
  sg->add_option("--restarts", gaussian.restarts, "Numeric restarts (0 = max(32, 8d))");
  sg->add_option("--csv", gaussian.csv, "CSV path (stdout if omitted)");

  KernelArgs kernel;
  auto* sk = app.add_subcommand("kernel", "Kernel expectation closed forms against Monte Carlo");
  sk->add_option("--field", kernel.field, "real | complex");
  sk->add_option("--grid", kernel.grid, "Number of angles on [0, pi/2]");
  sk->add_option("--mc-samples", kernel.mc_samples, "Monte Carlo samples per angle");
  sk->add_option("--seed", kernel.seed, "Seed");
  sk->add_option("--csv", kernel.csv, "CSV path (stdout if omitted)");

  RecoverArgs recover;
  auto* sr = app.add_subcommand("recover", "Quadratic-model recovery and error-bound check");
  auto* rm = sr->add_option("--matrix", recover.matrix, "Matrix file");
  auto* rg = sr->add_option("--gaussian", recover.gaussian, "Fresh Gaussian matrix per trial, as m,d");
  rm->excludes(rg);
  sr->add_option("--field", recover.field, "Field of --gaussian matrices");
  sr->add_option("--noise", recover.noise, "||eta|| as a fraction of || |A x0| ||");
  sr->add_option("--trials", recover.trials, "Trials");
  sr->add_option("--seed", recover.seed, "Seed");
  sr->add_option("--delta", recover.delta, "delta in (0, 0.05]");
  sr->add_option("--restarts", recover.restarts, "Random restarts besides the spectral start");
  sr->add_option("--csv", recover.csv, "CSV path (stdout if omitted)");

  OptimizeArgs optimize;
  auto* so = app.add_subcommand("optimize", "Search m x 2 real frames for the smallest condition number");
  so->add_option("--m", optimize.m, "Number of rows, 3..16");
  so->add_option("--restarts", optimize.restarts, "Random starts");
  so->add_option("--seed", optimize.seed, "Seed");
  so->add_option("--budget", optimize.budget, "Objective evaluations per start");
  so->add_option("--json", optimize.json, "Output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (sa->parsed()) return cmd_analyze(analyze, threads);
  if (sh->parsed()) return cmd_harmonic(harmonic, threads);
  if (sg->parsed()) return cmd_gaussian(gaussian, threads);
  if (sk->parsed()) return cmd_kernel(kernel, threads);
  if (sr->parsed()) return cmd_recover(recover, threads);
  if (so->parsed()) return cmd_optimize(optimize, threads);
  return kConfigError;
}

}  // namespace prstab::cli
