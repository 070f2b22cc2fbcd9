// aud: closed forms, simulation, figure sweeps and verification for the
// update-and-decision queue.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "aud/analytic.hpp"
#include "aud/csv.hpp"
#include "aud/experiments.hpp"
#include "aud/simulator.hpp"

namespace {

struct Options {
  double lambda = 1.0;
  double mu = 1.5;
  std::optional<double> rho;
  std::optional<double> nu;
  std::optional<int> m0;
  std::string service = "exp";
  std::string decision = "poisson";
  std::string discipline = "blocking1";
  std::optional<std::uint64_t> horizon;
  std::optional<std::uint64_t> warmup;
  std::optional<std::uint64_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<double> phase;
  std::string out;
  std::string in;
  std::string figure;
  std::string grid;
  std::string trace;
  std::size_t trace_events = 1000;
  double k = 5.0;
  double rel_tol = 0.05;
  unsigned threads = 0;
  bool no_baselines = false;
  bool mu_given = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double x) { return aud::csv::format_double(x); }

aud::ServiceKind service_kind(const std::string& s) {
  if (s == "uniform") return aud::ServiceKind::Uniform;
  if (s == "exp") return aud::ServiceKind::Exponential;
  return aud::ServiceKind::Deterministic;
}

double decision_rate(const Options& o) {
  if (o.nu) return *o.nu;
  if (o.m0) return *o.m0 * o.mu;
  throw UsageError("one of --nu or --m0 is required");
}

double arrival_rate(const Options& o) { return o.rho ? *o.rho * o.mu : o.lambda; }

aud::SystemSpec system_spec(const Options& o) {
  const double nu = decision_rate(o);
  auto decision = o.decision == "periodic" ? aud::DecisionModel::periodic(nu, o.phase)
                                           : aud::DecisionModel::poisson(nu);
  return {aud::ArrivalModel(arrival_rate(o)), aud::ServiceModel::named(service_kind(o.service), o.mu),
          decision,
          o.discipline == "fcfs" ? aud::Discipline::FcfsInfinite : aud::Discipline::Blocking1};
}

std::ostream& output(const Options& o, std::ofstream& file) {
  if (o.out.empty() || o.out == "-") return std::cout;
  file.open(o.out, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + o.out);
  return file;
}

void print_report(std::ostream& out, const std::string& prefix, const aud::AnalyticReport& r) {
  if (r.avg_aud) out << prefix << "=" << num(*r.avg_aud) << '\n';
  if (r.missing_prob) out << prefix << "=" << num(*r.missing_prob) << '\n';
  out << prefix << "_exactness=" << aud::to_string(r.exactness) << '\n';
  out << prefix << "_formula=" << r.formula_id << '\n';
}

int cmd_analytic(const Options& o) {
  const auto spec = system_spec(o);
  const bool blocking = spec.discipline == aud::Discipline::Blocking1;
  const auto res = aud::analyze_system(spec.arrival.lambda, spec.service, spec.decision, blocking);
  std::ofstream file;
  auto& out = output(o, file);
  out << "system=" << aud::system_label(spec.service.kind(), spec.decision.kind, blocking) << '\n';
  out << "lambda=" << num(spec.arrival.lambda) << "\nmu=" << num(o.mu) << "\nnu=" << num(spec.decision.nu)
      << "\nrho=" << num(spec.rho()) << '\n';
  if (res.aud) print_report(out, "avg_aud", *res.aud);
  else out << "avg_aud=\n";
  if (res.pmis) print_report(out, "missing_prob", *res.pmis);
  else out << "missing_prob=\n";
  return 0;
}

int cmd_simulate(const Options& o) {
  aud::SimRunConfig cfg{system_spec(o)};
  if (o.horizon) cfg.horizon = *o.horizon;
  if (o.warmup) cfg.warmup = *o.warmup;
  if (o.seed) cfg.seed = *o.seed;
  if (!o.trace.empty()) {
    std::ofstream tf(o.trace, std::ios::binary);
    if (!tf) throw std::runtime_error("cannot open " + o.trace);
    aud::trace(cfg, o.trace_events).write(tf);
  }
  const auto est = aud::replicate(cfg, o.reps.value_or(1));
  std::ofstream file;
  auto& out = output(o, file);
  const bool blocking = cfg.spec.discipline == aud::Discipline::Blocking1;
  out << "system=" << aud::system_label(cfg.spec.service.kind(), cfg.spec.decision.kind, blocking)
      << "\navg_aud=" << num(est.avg_aud) << "\naud_stderr=" << num(est.aud_stderr)
      << "\nmissing_prob=" << num(est.missing_prob) << "\npmis_stderr=" << num(est.pmis_stderr)
      << "\nn_decisions=" << est.n_decisions << "\nn_generated=" << est.n_generated
      << "\nn_successful=" << est.n_successful << "\nn_dropped=" << est.n_dropped
      << "\nn_intervals=" << est.n_intervals << "\nn_missed_updates=" << est.n_missed_updates
      << "\nmean_interdeparture=" << num(est.mean_interdeparture)
      << "\nmeasured_time=" << num(est.measured_time) << "\nmax_queue_length=" << est.max_queue_length
      << "\nn_replications=" << est.n_replications << '\n';
  return 0;
}

std::vector<double> parse_grid(const std::string& s) {
  // first:last:step or a comma-separated list
  if (s.find(':') != std::string::npos) {
    double a = 0, b = 0, st = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    if (!(in >> a >> c1 >> b >> c2 >> st) || c1 != ':' || c2 != ':') {
      throw UsageError("bad --grid " + s);
    }
    return aud::linear_grid(a, b, st);
  }
  std::vector<double> g;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      g.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("bad --grid " + s);
    }
  }
  return g;
}

aud::SweepSpec sweep_spec(const Options& o) {
  if (o.figure.empty()) throw UsageError("--figure is required");
  const auto fig = aud::parse_figure(o.figure);
  if (!fig) throw UsageError("unknown figure " + o.figure);
  auto s = aud::default_sweep(*fig);
  // Only explicitly given flags override the figure defaults.
  if (o.mu_given) s.mu = o.mu;
  if (o.rho) s.rho = *o.rho;
  if (o.nu) s.nu = *o.nu;
  if (o.m0) s.m0 = *o.m0;
  if (o.horizon) s.horizon = *o.horizon;
  if (o.warmup) s.warmup = *o.warmup;
  if (o.reps) s.reps = *o.reps;
  if (o.seed) s.seed = *o.seed;
  if (!o.grid.empty()) s.grid = parse_grid(o.grid);
  s.include_baselines = !o.no_baselines;
  s.threads = o.threads;
  s.tolerance = {o.k, o.rel_tol};
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return s;
}

int cmd_sweep(const Options& o) {
  const auto spec = sweep_spec(o);
  const auto table = aud::run_sweep(spec);
  if (o.out.empty() || o.out == "-") aud::write_csv(table, std::cout);
  else aud::emit_csv(table, o.out);
  return 0;
}

int cmd_verify(const Options& o) {
  if (o.figure.empty()) throw UsageError("--figure is required");
  const auto fig = aud::parse_figure(o.figure);
  if (!fig) throw UsageError("unknown figure " + o.figure);
  aud::SweepTable table;
  if (!o.in.empty()) {
    std::ifstream in(o.in, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + o.in);
    table = aud::read_csv(in);
  } else {
    table = aud::run_sweep(sweep_spec(o));
  }
  const auto report = aud::verify(*fig, table, {o.k, o.rel_tol});
  std::ofstream file;
  output(o, file) << report.summary();
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age upon decisions: closed forms, simulation and figure sweeps"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; command-line flags override it");

  Options o;
  app.add_option("--lambda", o.lambda, "update arrival rate")->check(CLI::PositiveNumber);
  app.add_option("--mu", o.mu, "service rate")->check(CLI::PositiveNumber);
  app.add_option("--rho", o.rho, "offered load; sets lambda = rho * mu")->check(CLI::PositiveNumber);
  app.add_option("--nu", o.nu, "decision rate")->check(CLI::PositiveNumber);
  app.add_option("--m0", o.m0, "decision rate as a multiple of mu")->check(CLI::PositiveNumber);
  app.add_option("--service", o.service)->check(CLI::IsMember({"uniform", "exp", "det"}));
  app.add_option("--decision", o.decision)->check(CLI::IsMember({"poisson", "periodic"}));
  app.add_option("--discipline", o.discipline)->check(CLI::IsMember({"blocking1", "fcfs"}));
  app.add_option("--horizon", o.horizon, "measured decisions per replication, warm-up included");
  app.add_option("--warmup", o.warmup, "decisions discarded after the first departure");
  app.add_option("--reps", o.reps, "replications")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed);
  app.add_option("--phase", o.phase, "periodic decision phase in [0, 1/nu)");
  app.add_option("--out", o.out, "output file (stdout when absent)");
  app.add_option("--in", o.in, "verify: read this sweep CSV instead of running the sweep");
  app.add_option("--figure", o.figure)
      ->check(CLI::IsMember({"fig_aud_vs_rho_M", "fig_pmis_vs_nu_M", "fig_aud_vs_rho_D",
                             "fig_pmis_vs_nu_D", "fig_decision_compare", "fig_summary_bar"}));
  app.add_option("--grid", o.grid, "first:last:step or v1,v2,...");
  app.add_flag("--no-baselines", o.no_baselines, "skip FCFS infinite-buffer rows");
  app.add_option("--threads", o.threads, "worker threads (0: all cores)");
  app.add_option("--trace", o.trace, "simulate: write an event trace to this file");
  app.add_option("--trace-events", o.trace_events);
  app.add_option("--k", o.k, "stderr band for exact rows")->check(CLI::PositiveNumber);
  app.add_option("--rel-tol", o.rel_tol, "relative band for approximate rows")->check(CLI::PositiveNumber);

  auto* analytic = app.add_subcommand("analytic", "closed-form AuD and missing probability");
  auto* simulate = app.add_subcommand("simulate", "simulate one system");
  auto* sweep = app.add_subcommand("sweep", "run a figure sweep and write CSV");
  auto* verify = app.add_subcommand("verify", "check a figure sweep against its tolerances and claims");
  for (auto* sub : {analytic, simulate, sweep, verify}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  o.mu_given = app.get_option("--mu")->count() > 0;

  try {
    if (*analytic) return cmd_analytic(o);
    if (*simulate) return cmd_simulate(o);
    if (*sweep) return cmd_sweep(o);
    return cmd_verify(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
