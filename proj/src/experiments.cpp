#include "aud/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "aud/csv.hpp"

namespace aud {

namespace {

constexpr std::array<ServiceKind, 3> kKinds{ServiceKind::Uniform, ServiceKind::Exponential,
                                            ServiceKind::Deterministic};

struct FigureName {
  FigureId id;
  std::string_view name;
};

constexpr std::array<FigureName, 6> kFigureNames{{
    {FigureId::AudVsRhoM, "fig_aud_vs_rho_M"},
    {FigureId::PmisVsNuM, "fig_pmis_vs_nu_M"},
    {FigureId::AudVsRhoD, "fig_aud_vs_rho_D"},
    {FigureId::PmisVsNuD, "fig_pmis_vs_nu_D"},
    {FigureId::DecisionCompare, "fig_decision_compare"},
    {FigureId::SummaryBar, "fig_summary_bar"},
}};

struct RowPlan {
  double swept;
  double lambda;
  double nu;
  ServiceKind service;
  Discipline discipline;
  DecisionKind decision;
};

std::vector<RowPlan> plan_rows(const SweepSpec& spec) {
  std::vector<RowPlan> plans;
  auto add = [&](double swept, double rho, double nu, Discipline disc, DecisionKind dec) {
    if (disc == Discipline::FcfsInfinite && !(rho < 1.0)) return;
    for (auto kind : kKinds) plans.push_back({swept, rho * spec.mu, nu, kind, disc, dec});
  };
  const bool base = spec.include_baselines;
  for (double x : spec.grid) {
    switch (spec.figure) {
      case FigureId::AudVsRhoM:
        add(x, x, spec.nu, Discipline::Blocking1, DecisionKind::Poisson);
        if (base) add(x, x, spec.nu, Discipline::FcfsInfinite, DecisionKind::Poisson);
        break;
      case FigureId::PmisVsNuM:
        add(x, spec.rho, x, Discipline::Blocking1, DecisionKind::Poisson);
        if (base) add(x, spec.rho, x, Discipline::FcfsInfinite, DecisionKind::Poisson);
        break;
      case FigureId::AudVsRhoD:
        add(x, x, spec.m0 * spec.mu, Discipline::Blocking1, DecisionKind::Periodic);
        if (base) add(x, x, spec.m0 * spec.mu, Discipline::FcfsInfinite, DecisionKind::Periodic);
        break;
      case FigureId::PmisVsNuD:
        add(x, spec.rho, x, Discipline::Blocking1, DecisionKind::Periodic);
        if (base) add(x, spec.rho, x, Discipline::FcfsInfinite, DecisionKind::Periodic);
        break;
      case FigureId::DecisionCompare:
        add(x, spec.rho, x, Discipline::Blocking1, DecisionKind::Poisson);
        add(x, spec.rho, x, Discipline::Blocking1, DecisionKind::Periodic);
        break;
      case FigureId::SummaryBar:
        for (auto disc : {Discipline::Blocking1, Discipline::FcfsInfinite}) {
          if (disc == Discipline::FcfsInfinite && !base) continue;
          add(x, x, spec.nu, disc, DecisionKind::Poisson);
          add(x, x, spec.nu, disc, DecisionKind::Periodic);
        }
        break;
    }
  }
  return plans;
}

SweepRow compute_row(const SweepSpec& spec, const RowPlan& plan) {
  SweepRow row;
  row.swept = plan.swept;
  row.service = plan.service;
  row.discipline = plan.discipline;
  row.decision = plan.decision;
  const bool blocking = plan.discipline == Discipline::Blocking1;
  row.system = system_label(plan.service, plan.decision, blocking);

  try {
    const auto service = ServiceModel::named(plan.service, spec.mu);
    const auto decision = plan.decision == DecisionKind::Poisson
                              ? DecisionModel::poisson(plan.nu)
                              : DecisionModel::periodic(plan.nu);
    const auto analytic = analyze_system(plan.lambda, service, decision, blocking);
    if (analytic.aud) {
      row.analytic_aud = analytic.aud->avg_aud;
      row.aud_exactness = analytic.aud->exactness;
    }
    if (analytic.pmis) {
      row.analytic_pmis = analytic.pmis->missing_prob;
      row.pmis_exactness = analytic.pmis->exactness;
    }

    SimRunConfig config{SystemSpec{ArrivalModel(plan.lambda), service, decision, plan.discipline},
                        spec.horizon, spec.warmup, spec.seed};
    const auto est = replicate(config, spec.reps);
    row.sim_aud = est.avg_aud;
    row.sim_aud_stderr = est.aud_stderr;
    row.sim_pmis = est.missing_prob;
    row.sim_pmis_stderr = est.pmis_stderr;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  evaluate_row(row, spec.tolerance, figure_metrics(spec.figure));
  return row;
}

std::optional<double> rel_dev(const std::optional<double>& sim, const std::optional<double>& analytic) {
  if (!sim || !analytic || *analytic == 0.0) return std::nullopt;
  return std::abs(*sim - *analytic) / std::abs(*analytic);
}

// nullopt: nothing to compare.
std::optional<bool> metric_ok(const std::optional<double>& sim, const std::optional<double>& se,
                              const std::optional<double>& analytic,
                              const std::optional<Exactness>& exactness,
                              const TolerancePolicy& policy) {
  if (!sim || !analytic) return std::nullopt;
  const double dev = std::abs(*sim - *analytic);
  if (dev <= policy.k_stderr * se.value_or(0.0)) return true;
  if (exactness == Exactness::UniformEpochApprox) {
    return dev <= policy.approx_rel * std::abs(*analytic);
  }
  return false;
}

Exactness aud_exactness_for(DecisionKind d) {
  return d == DecisionKind::Periodic ? Exactness::UniformEpochApprox : Exactness::Exact;
}

Exactness pmis_exactness_for(ServiceKind s, DecisionKind d) {
  return d == DecisionKind::Periodic && s != ServiceKind::Deterministic
             ? Exactness::UniformEpochApprox
             : Exactness::Exact;
}

std::string fmt(double x) { return csv::format_double(x); }

std::string opt_field(const std::optional<double>& x) { return x ? fmt(*x) : std::string(); }

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("bad number in CSV: " + s);
  }
  return v;
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

std::string row_id(const SweepRow& r) {
  return r.system + " @ " + fmt(r.swept);
}

// --- claim helpers -----------------------------------------------------------

const SweepRow* find_row(const SweepTable& t, double swept, ServiceKind s, Discipline disc,
                         DecisionKind dec) {
  for (const auto& r : t) {
    if (r.swept == swept && r.service == s && r.discipline == disc && r.decision == dec) return &r;
  }
  return nullptr;
}

std::vector<double> grid_of(const SweepTable& t) {
  std::vector<double> g;
  for (const auto& r : t) {
    if (std::find(g.begin(), g.end(), r.swept) == g.end()) g.push_back(r.swept);
  }
  std::sort(g.begin(), g.end());
  return g;
}

using Metric = std::optional<double> SweepRow::*;

// Strictly decreasing along the grid for every service kind.
ClaimResult decreasing(const SweepTable& t, std::string name, Discipline disc, DecisionKind dec,
                       Metric metric) {
  ClaimResult c{std::move(name), true, "strictly decreasing for U, M, D"};
  const auto grid = grid_of(t);
  for (auto kind : kKinds) {
    std::optional<double> prev;
    for (double x : grid) {
      const auto* r = find_row(t, x, kind, disc, dec);
      if (!r || !(r->*metric)) continue;
      const double v = *(r->*metric);
      if (prev && !(v < *prev)) {
        c.pass = false;
        c.detail = row_id(*r) + ": " + fmt(v) + " not below " + fmt(*prev);
        return c;
      }
      prev = v;
    }
  }
  return c;
}

// For every grid point, analytic values ordered by the given service kinds.
ClaimResult ordered(const SweepTable& t, std::string name, Discipline disc, DecisionKind dec,
                    Metric metric, std::array<ServiceKind, 3> order) {
  ClaimResult c{std::move(name), true, ""};
  std::size_t checked = 0;
  for (double x : grid_of(t)) {
    std::array<std::optional<double>, 3> v;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto* r = find_row(t, x, order[i], disc, dec);
      if (r) v[i] = r->*metric;
    }
    if (!v[0] || !v[1] || !v[2]) continue;
    ++checked;
    if (!(*v[0] < *v[1] && *v[1] < *v[2])) {
      c.pass = false;
      c.detail = "violated at " + fmt(x);
      return c;
    }
  }
  c.detail = std::to_string(checked) + " grid points ordered";
  if (checked == 0) {
    c.pass = false;
    c.detail = "no comparable rows";
  }
  return c;
}

// lhs(metric) < rhs(metric) (or <= when !strict) for every grid point and kind
// where both rows exist and `include(x)` holds.
ClaimResult dominates(const SweepTable& t, std::string name, Discipline ld, DecisionKind lk,
                      Discipline rd, DecisionKind rk, Metric metric, bool strict,
                      const std::function<bool(double)>& include,
                      const std::vector<ServiceKind>& kinds = {kKinds.begin(), kKinds.end()}) {
  ClaimResult c{std::move(name), true, ""};
  std::size_t checked = 0;
  for (double x : grid_of(t)) {
    if (!include(x)) continue;
    for (auto kind : kinds) {
      const auto* l = find_row(t, x, kind, ld, lk);
      const auto* r = find_row(t, x, kind, rd, rk);
      if (!l || !r || !(l->*metric) || !(r->*metric)) continue;
      ++checked;
      const double a = *(l->*metric);
      const double b = *(r->*metric);
      if (strict ? !(a < b) : !(a <= b)) {
        c.pass = false;
        c.detail = row_id(*l) + " = " + fmt(a) + " vs " + row_id(*r) + " = " + fmt(b);
        return c;
      }
    }
  }
  c.detail = std::to_string(checked) + " pairs compared";
  if (checked == 0) {
    c.pass = false;
    c.detail = "no comparable rows";
  }
  return c;
}

bool always(double) { return true; }

}  // namespace

std::string_view to_string(FigureId f) {
  for (const auto& n : kFigureNames) {
    if (n.id == f) return n.name;
  }
  return "?";
}

std::optional<FigureId> parse_figure(std::string_view name) {
  for (const auto& n : kFigureNames) {
    if (n.name == name) return n.id;
  }
  return std::nullopt;
}

const std::vector<FigureId>& all_figures() {
  static const std::vector<FigureId> figures = [] {
    std::vector<FigureId> v;
    for (const auto& n : kFigureNames) v.push_back(n.id);
    return v;
  }();
  return figures;
}

std::vector<double> linear_grid(double first, double last, double step) {
  if (!(step > 0.0) || last < first) throw std::invalid_argument("bad grid bounds");
  const auto n = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9)) + 1;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = first + static_cast<double>(i) * step;
    g[i] = std::round(v * 1e12) / 1e12;
  }
  return g;
}

void SweepSpec::validate() const {
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw std::invalid_argument("sweep grid values must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("sweep grid must be strictly increasing");
    }
  }
  if (!(mu > 0.0) || !(rho > 0.0) || !(nu > 0.0) || m0 < 1) {
    throw std::invalid_argument("sweep rates must be positive and m0 >= 1");
  }
  if (horizon <= warmup || reps < 1) throw std::invalid_argument("simulation budget must be positive");
}

SweepSpec default_sweep(FigureId figure) {
  SweepSpec s;
  s.figure = figure;
  const auto rho_grid = linear_grid(0.1, 3.0, 0.1);
  const auto nu_grid = linear_grid(0.5, 10.0, 0.5);
  switch (figure) {
    case FigureId::AudVsRhoM:
      s.mu = 1.5;
      s.nu = 1.5;
      s.grid = rho_grid;
      break;
    case FigureId::PmisVsNuM:
      s.mu = 0.5;
      s.rho = 0.5;
      s.grid = nu_grid;
      break;
    case FigureId::AudVsRhoD:
      s.mu = 1.5;
      s.m0 = 30;
      s.grid = rho_grid;
      s.horizon = 1'000'000;
      break;
    case FigureId::PmisVsNuD:
      // nu = m0 mu with m0 = 1..20
      s.mu = 0.5;
      s.rho = 0.5;
      s.grid = nu_grid;
      s.horizon = 400'000;
      break;
    case FigureId::DecisionCompare:
      s.mu = 0.5;
      s.rho = 0.5;
      s.grid = nu_grid;
      break;
    case FigureId::SummaryBar:
      s.mu = 1.5;
      s.nu = 3.0;
      s.grid = {0.6};
      s.horizon = 1'000'000;
      break;
  }
  return s;
}

FigureMetrics figure_metrics(FigureId f) {
  switch (f) {
    case FigureId::AudVsRhoM:
    case FigureId::AudVsRhoD: return {true, false};
    case FigureId::PmisVsNuM:
    case FigureId::PmisVsNuD: return {false, true};
    default: return {true, true};
  }
}

void evaluate_row(SweepRow& row, const TolerancePolicy& policy, FigureMetrics metrics) {
  row.rel_dev_aud = rel_dev(row.sim_aud, row.analytic_aud);
  row.rel_dev_pmis = rel_dev(row.sim_pmis, row.analytic_pmis);
  if (!row.error.empty()) {
    row.pass = false;
    return;
  }
  std::optional<bool> pass;
  auto fold = [&](std::optional<bool> ok) {
    if (!ok) return;
    pass = pass.value_or(true) && *ok;
  };
  if (metrics.aud) {
    fold(metric_ok(row.sim_aud, row.sim_aud_stderr, row.analytic_aud, row.aud_exactness, policy));
  }
  if (metrics.pmis) {
    fold(metric_ok(row.sim_pmis, row.sim_pmis_stderr, row.analytic_pmis, row.pmis_exactness, policy));
  }
  row.pass = pass;
}

SweepTable run_sweep(const SweepSpec& spec) {
  spec.validate();
  const auto plans = plan_rows(spec);
  SweepTable table(plans.size());

  unsigned threads = spec.threads ? spec.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(plans.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < plans.size(); i = next++) table[i] = compute_row(spec, plans[i]);
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return table;
}

void write_csv(const SweepTable& table, std::ostream& out) {
  out << kCsvHeader << "\r\n";
  for (const auto& r : table) {
    std::string pass;
    if (!r.error.empty()) pass = "error";
    else if (r.pass) pass = *r.pass ? "true" : "false";
    csv::write_record(out, {fmt(r.swept), r.system, std::string(to_string(r.discipline)),
                            std::string(to_string(r.decision)), opt_field(r.analytic_aud),
                            opt_field(r.sim_aud), opt_field(r.sim_aud_stderr),
                            opt_field(r.analytic_pmis), opt_field(r.sim_pmis),
                            opt_field(r.sim_pmis_stderr), opt_field(r.rel_dev_aud),
                            opt_field(r.rel_dev_pmis), pass});
  }
}

void emit_csv(const SweepTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(table, out);
  out.flush();
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

SweepTable read_csv(std::istream& in) {
  const auto records = csv::read(in);
  if (records.empty()) throw std::runtime_error("missing CSV header");
  std::ostringstream header;
  csv::write_record(header, records.front());
  if (header.str() != std::string(kCsvHeader) + "\r\n") throw std::runtime_error("unexpected CSV header");

  SweepTable table;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    if (f.size() != 13) throw std::runtime_error("CSV row " + std::to_string(i) + " has wrong arity");
    SweepRow r;
    r.swept = parse_double(f[0]);
    r.system = f[1];
    if (r.system.size() < 3) throw std::runtime_error("bad system label " + r.system);
    switch (r.system[2]) {
      case 'U': r.service = ServiceKind::Uniform; break;
      case 'M': r.service = ServiceKind::Exponential; break;
      case 'D': r.service = ServiceKind::Deterministic; break;
      default: r.service = ServiceKind::GeneralMoments; break;
    }
    r.discipline = f[2] == "fcfs" ? Discipline::FcfsInfinite : Discipline::Blocking1;
    r.decision = f[3] == "periodic" ? DecisionKind::Periodic : DecisionKind::Poisson;
    r.analytic_aud = parse_opt(f[4]);
    r.sim_aud = parse_opt(f[5]);
    r.sim_aud_stderr = parse_opt(f[6]);
    r.analytic_pmis = parse_opt(f[7]);
    r.sim_pmis = parse_opt(f[8]);
    r.sim_pmis_stderr = parse_opt(f[9]);
    r.rel_dev_aud = parse_opt(f[10]);
    r.rel_dev_pmis = parse_opt(f[11]);
    if (r.analytic_aud) r.aud_exactness = aud_exactness_for(r.decision);
    if (r.analytic_pmis) r.pmis_exactness = pmis_exactness_for(r.service, r.decision);
    if (f[12] == "true") r.pass = true;
    else if (f[12] == "false") r.pass = false;
    else if (f[12] == "error") {
      r.pass = false;
      r.error = "error";
    }
    table.push_back(std::move(r));
  }
  return table;
}

std::vector<ClaimResult> check_claims(FigureId figure, const SweepTable& t) {
  using D = Discipline;
  using K = DecisionKind;
  constexpr std::array<ServiceKind, 3> due{ServiceKind::Deterministic, ServiceKind::Uniform,
                                           ServiceKind::Exponential};
  auto above_half = [](double rho) { return rho > 0.5 && rho < 1.0; };
  const bool baselines = std::any_of(t.begin(), t.end(), [](const SweepRow& r) {
    return r.discipline == Discipline::FcfsInfinite;
  });
  std::vector<ClaimResult> out;
  switch (figure) {
    case FigureId::AudVsRhoM:
      out.push_back(decreasing(t, "aud decreasing in rho (bufferless, analytic)", D::Blocking1,
                               K::Poisson, &SweepRow::analytic_aud));
      out.push_back(ordered(t, "aud order D < U < M (analytic)", D::Blocking1, K::Poisson,
                            &SweepRow::analytic_aud, due));
      if (baselines)
        out.push_back(dominates(t, "blocking aud below FCFS for rho > 0.5 (simulated)", D::Blocking1,
                              K::Poisson, D::FcfsInfinite, K::Poisson, &SweepRow::sim_aud, true,
                              above_half));
      break;
    case FigureId::PmisVsNuM:
      out.push_back(decreasing(t, "pmis decreasing in nu (bufferless, analytic)", D::Blocking1,
                               K::Poisson, &SweepRow::analytic_pmis));
      out.push_back(ordered(t, "pmis order D < U < M (analytic)", D::Blocking1, K::Poisson,
                            &SweepRow::analytic_pmis, due));
      if (baselines) {
        out.push_back(dominates(t, "bufferless pmis below FCFS (analytic)", D::Blocking1, K::Poisson,
                                D::FcfsInfinite, K::Poisson, &SweepRow::analytic_pmis, true, always));
        out.push_back(dominates(t, "bufferless pmis not above FCFS (simulated)", D::Blocking1,
                                K::Poisson, D::FcfsInfinite, K::Poisson, &SweepRow::sim_pmis, false,
                                always));
      }
      break;
    case FigureId::AudVsRhoD:
      out.push_back(decreasing(t, "aud decreasing in rho (bufferless, analytic)", D::Blocking1,
                               K::Periodic, &SweepRow::analytic_aud));
      if (baselines)
        out.push_back(dominates(t, "blocking aud below FCFS for rho > 0.5 (simulated)", D::Blocking1,
                              K::Periodic, D::FcfsInfinite, K::Periodic, &SweepRow::sim_aud, true,
                              above_half));
      {
        // D row against U and M rows at the same grid point.
        ClaimResult c{"deterministic service lowest aud (analytic)", true, ""};
        std::size_t n = 0;
        for (double x : grid_of(t)) {
          const auto* d = find_row(t, x, ServiceKind::Deterministic, D::Blocking1, K::Periodic);
          const auto* u = find_row(t, x, ServiceKind::Uniform, D::Blocking1, K::Periodic);
          const auto* m = find_row(t, x, ServiceKind::Exponential, D::Blocking1, K::Periodic);
          if (!d || !u || !m || !d->analytic_aud || !u->analytic_aud || !m->analytic_aud) continue;
          ++n;
          if (c.pass && !(*d->analytic_aud < std::min(*u->analytic_aud, *m->analytic_aud))) {
            c.pass = false;
            c.detail = "violated at " + fmt(x);
          }
        }
        if (n == 0) {
          c.pass = false;
          c.detail = "no comparable rows";
        } else if (c.pass) {
          c.detail = std::to_string(n) + " grid points";
        }
        out.push_back(c);
      }
      break;
    case FigureId::PmisVsNuD: {
      ClaimResult c{"deterministic service pmis identically 0 (simulated and analytic)", true, ""};
      std::size_t n = 0;
      for (const auto& r : t) {
        if (r.service != ServiceKind::Deterministic || r.discipline != D::Blocking1) continue;
        ++n;
        if (r.sim_pmis != 0.0 || (r.analytic_pmis && *r.analytic_pmis != 0.0)) {
          c.pass = false;
          c.detail = row_id(r) + " has nonzero pmis";
        }
      }
      if (c.pass) c.detail = std::to_string(n) + " rows";
      out.push_back(c);
      if (baselines)
        out.push_back(dominates(t, "bufferless pmis not above FCFS (simulated)", D::Blocking1,
                              K::Periodic, D::FcfsInfinite, K::Periodic, &SweepRow::sim_pmis, false,
                              always));
      break;
    }
    case FigureId::DecisionCompare: {
      out.push_back(decreasing(t, "periodic aud decreasing in nu (analytic)", D::Blocking1,
                               K::Periodic, &SweepRow::analytic_aud));
      out.push_back(dominates(t, "poisson aud not above periodic (analytic)", D::Blocking1,
                              K::Poisson, D::Blocking1, K::Periodic, &SweepRow::analytic_aud, false,
                              always));
      {
        ClaimResult c{"periodic aud gap to poisson shrinks with nu (analytic)", true, ""};
        const auto grid = grid_of(t);
        for (auto kind : kKinds) {
          std::optional<double> first_gap;
          std::optional<double> last_gap;
          for (double x : grid) {
            const auto* p = find_row(t, x, kind, D::Blocking1, K::Periodic);
            const auto* m = find_row(t, x, kind, D::Blocking1, K::Poisson);
            if (!p || !m || !p->analytic_aud || !m->analytic_aud) continue;
            const double gap = *p->analytic_aud - *m->analytic_aud;
            if (!first_gap) first_gap = gap;
            last_gap = gap;
          }
          if (!first_gap || !(*last_gap < *first_gap)) {
            c.pass = false;
            c.detail = std::string("no shrinking gap for ") + kendall_code(kind);
          } else if (c.pass) {
            c.detail += std::string(c.detail.empty() ? "" : ", ") + kendall_code(kind) + " " +
                        fmt(*first_gap) + " -> " + fmt(*last_gap);
          }
        }
        out.push_back(c);
      }
      {
        // Reported, not asserted: ratio of simulated periodic to Poisson AuD.
        double lo = INFINITY;
        double hi = -INFINITY;
        for (const auto& r : t) {
          if (r.decision != K::Periodic || !r.sim_aud) continue;
          const auto* m = find_row(t, r.swept, r.service, D::Blocking1, K::Poisson);
          if (!m || !m->sim_aud) continue;
          lo = std::min(lo, *r.sim_aud / *m->sim_aud);
          hi = std::max(hi, *r.sim_aud / *m->sim_aud);
        }
        out.push_back({"simulated periodic/poisson aud ratio", true,
                       "range [" + fmt(lo) + ", " + fmt(hi) + "] (informational)"});
      }
      out.push_back(dominates(t, "periodic pmis below poisson (analytic)", D::Blocking1,
                              K::Periodic, D::Blocking1, K::Poisson, &SweepRow::analytic_pmis, true,
                              always));
      out.push_back(dominates(t, "periodic pmis not above poisson (simulated)", D::Blocking1,
                              K::Periodic, D::Blocking1, K::Poisson, &SweepRow::sim_pmis, false,
                              always));
      break;
    }
    case FigureId::SummaryBar: {
      const std::vector<ServiceKind> det{ServiceKind::Deterministic};
      if (!baselines) break;
      for (auto dec : {K::Poisson, K::Periodic}) {
        const std::string tag = dec == K::Poisson ? "poisson" : "periodic";
        out.push_back(dominates(t, "D service, " + tag + " decisions: blocking aud below FCFS",
                                D::Blocking1, dec, D::FcfsInfinite, dec, &SweepRow::sim_aud, true,
                                always, det));
        out.push_back(dominates(t, "D service, " + tag + " decisions: blocking pmis not above FCFS",
                                D::Blocking1, dec, D::FcfsInfinite, dec, &SweepRow::sim_pmis, false,
                                always, det));
      }
      break;
    }
  }
  return out;
}

VerifyReport verify(FigureId figure, const SweepTable& table, const TolerancePolicy& policy) {
  VerifyReport rep;
  rep.figure = figure;
  const auto metrics = figure_metrics(figure);
  auto track_gap = [](std::optional<double>& slot, const std::optional<double>& gap) {
    if (gap) slot = std::max(slot.value_or(0.0), *gap);
  };
  for (auto row : table) {
    evaluate_row(row, policy, metrics);
    if (!row.error.empty()) {
      rep.failures.push_back(row_id(row) + ": error " + row.error);
      continue;
    }
    if (!row.pass) continue;
    ++rep.rows_checked;
    if (!*row.pass) {
      std::ostringstream msg;
      msg << row_id(row);
      if (metrics.aud && row.analytic_aud) {
        msg << " aud sim=" << fmt(*row.sim_aud) << " analytic=" << fmt(*row.analytic_aud)
            << " se=" << fmt(row.sim_aud_stderr.value_or(0.0));
      }
      if (metrics.pmis && row.analytic_pmis) {
        msg << " pmis sim=" << fmt(*row.sim_pmis) << " analytic=" << fmt(*row.analytic_pmis)
            << " se=" << fmt(row.sim_pmis_stderr.value_or(0.0));
      }
      rep.failures.push_back(msg.str());
    }
    auto z = [](const std::optional<double>& sim, const std::optional<double>& se,
                const std::optional<double>& a) -> std::optional<double> {
      if (!sim || !a || !se || *se <= 0.0) return std::nullopt;
      return std::abs(*sim - *a) / *se;
    };
    if (metrics.aud && row.aud_exactness) {
      if (*row.aud_exactness == Exactness::Exact) {
        track_gap(rep.max_exact_z, z(row.sim_aud, row.sim_aud_stderr, row.analytic_aud));
      } else {
        track_gap(rep.max_approx_gap_aud, row.rel_dev_aud);
      }
    }
    if (metrics.pmis && row.pmis_exactness) {
      if (*row.pmis_exactness == Exactness::Exact) {
        track_gap(rep.max_exact_z, z(row.sim_pmis, row.sim_pmis_stderr, row.analytic_pmis));
      } else {
        if (row.sim_pmis && row.analytic_pmis) {
          track_gap(rep.max_approx_gap_pmis, std::abs(*row.sim_pmis - *row.analytic_pmis));
        }
      }
    }
  }
  rep.claims = check_claims(figure, table);
  rep.pass = rep.failures.empty() &&
             std::all_of(rep.claims.begin(), rep.claims.end(), [](const auto& c) { return c.pass; });
  return rep;
}

std::string VerifyReport::summary() const {
  std::ostringstream out;
  out << to_string(figure) << ": " << (pass ? "pass" : "fail") << " (" << rows_checked
      << " rows checked, " << failures.size() << " failing)\n";
  if (max_exact_z) out << "  max |z| over exact rows: " << fmt(*max_exact_z) << '\n';
  if (max_approx_gap_aud) out << "  max relative gap, approximate aud: " << fmt(*max_approx_gap_aud) << '\n';
  if (max_approx_gap_pmis) out << "  max absolute gap, approximate pmis: " << fmt(*max_approx_gap_pmis) << '\n';
  for (const auto& c : claims) {
    out << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": " << c.detail << '\n';
  }
  for (const auto& f : failures) out << "  row failed: " << f << '\n';
  return out.str();
}

}  // namespace aud
