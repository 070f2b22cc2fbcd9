// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aud/analytic.hpp"
#include "aud/experiments.hpp"
#include "aud/simulator.hpp"

using namespace aud;

namespace {

constexpr std::array<ServiceKind, 3> kKinds{ServiceKind::Uniform, ServiceKind::Exponential,
                                            ServiceKind::Deterministic};

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(double x, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, x);
  return buf;
}

SimRunConfig config(double lambda, ServiceKind kind, double mu, DecisionModel decision,
                    std::uint64_t horizon, std::uint64_t seed) {
  return {SystemSpec{ArrivalModel(lambda), ServiceModel::named(kind, mu), decision, Discipline::Blocking1},
          horizon, 1000, seed};
}

// 1. Specialised forms against the general ones.
Outcome closed_form_consistency() {
  Outcome o;
  std::mt19937_64 gen(1001);
  std::uniform_real_distribution<double> rate(0.1, 10.0);
  std::uniform_int_distribution<int> m0s(1, 1000);
  double worst_m = 0.0, worst_d = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double lambda = rate(gen), mu = rate(gen);
    const int m0 = m0s(gen);
    for (auto k : kKinds) {
      const double special = aud_specialized_m(lambda, mu, k);
      const double general = *aud_mg11_m(lambda, ServiceModel::named(k, mu)).avg_aud;
      worst_m = std::max(worst_m, rel(special, general));

      const double closed = *aud_specialized_d(lambda, mu, m0, k).avg_aud;
      const double composed = aud_mg11_d_general(1.0 / mu, 1.0 / lambda + 1.0 / mu, m0 * mu,
                                                 decision_count_moments(lambda, mu, m0, k));
      worst_d = std::max(worst_d, rel(closed, composed));
    }
  }
  if (!(worst_m < 1e-12)) o.fail("Poisson-decision forms differ by " + fmt(worst_m));
  if (!(worst_d < 1e-12)) o.fail("periodic-decision forms differ by " + fmt(worst_d));
  if (o.pass) o.detail = "max rel err " + fmt(worst_m, 3) + " (Poisson), " + fmt(worst_d, 3) + " (periodic)";
  return o;
}

// 2. Simulation against the exact Poisson-decision results.
Outcome exact_formulas() {
  Outcome o;
  double worst_z = 0.0;
  int checks = 0;
  for (auto [lambda, mu] : {std::pair{1.0, 1.5}, std::pair{1.0, 2.0}, std::pair{3.0, 1.5}}) {
    for (double nu : {1.0, 5.0}) {
      for (auto k : kKinds) {
        const auto service = ServiceModel::named(k, mu);
        const auto est = replicate(config(lambda, k, mu, DecisionModel::poisson(nu), 2'000'000, 2024), 8);
        const double aud = *aud_mg11_m(lambda, service).avg_aud;
        const double pmis = pmis_mg11_m(lambda, nu, service);
        const double za = std::abs(est.avg_aud - aud) / est.aud_stderr;
        const double zp = std::abs(est.missing_prob - pmis) / est.pmis_stderr;
        worst_z = std::max({worst_z, za, zp});
        checks += 2;
        const std::string where = system_label(k, DecisionKind::Poisson, true) + " lambda=" + fmt(lambda) +
                                  " mu=" + fmt(mu) + " nu=" + fmt(nu);
        if (!(za <= 5.0)) o.fail(where + ": AuD " + fmt(est.avg_aud) + " vs " + fmt(aud) + ", z=" + fmt(za, 3));
        if (!(zp <= 5.0)) o.fail(where + ": pmis " + fmt(est.missing_prob) + " vs " + fmt(pmis) + ", z=" + fmt(zp, 3));
      }
    }
  }
  if (o.pass) o.detail = std::to_string(checks) + " comparisons, max |z| = " + fmt(worst_z, 3);
  return o;
}

// 3. Periodic decisions at m0 = 30.
Outcome approximation_audit() {
  Outcome o;
  const double mu = 1.5;
  const int m0 = 30;
  double worst_aud = 0.0, worst_pmis_z = 0.0;
  for (double rho : {0.25, 0.5, 1.0, 2.0}) {
    for (auto k : kKinds) {
      const auto est = replicate(
          config(rho * mu, k, mu, DecisionModel::periodic(m0 * mu), 4'000'000, 3030), 8);
      const std::string where = system_label(k, DecisionKind::Periodic, true) + " rho=" + fmt(rho);
      const double aud = *aud_specialized_d(rho * mu, mu, m0, k).avg_aud;
      const double gap = rel(est.avg_aud, aud);
      worst_aud = std::max(worst_aud, gap);
      if (!(gap <= 0.05)) o.fail(where + ": AuD gap " + fmt(gap, 3));

      if (k == ServiceKind::Deterministic) {
        if (est.missing_prob != 0.0) o.fail(where + ": pmis " + fmt(est.missing_prob) + " not 0");
        continue;
      }
      // The exponential form is singular at rho = 1; evaluate just beside it.
      const double rho_eval = (k == ServiceKind::Exponential && rho == 1.0) ? 1.0 + 1e-6 : rho;
      const double pmis = *pmis_mg11_d(rho_eval * mu, mu, m0, k).missing_prob;
      const double z = std::abs(est.missing_prob - pmis) / est.pmis_stderr;
      worst_pmis_z = std::max(worst_pmis_z, z);
      if (!(z <= 5.0 || rel(est.missing_prob, pmis) <= 0.10)) {
        o.fail(where + ": pmis " + fmt(est.missing_prob) + " vs " + fmt(pmis) + ", z=" + fmt(z, 3));
      }
    }
  }
  if (o.pass) {
    o.detail = "max AuD gap " + fmt(100 * worst_aud, 3) + "%, max pmis |z| " + fmt(worst_pmis_z, 3) +
               ", D pmis exactly 0";
  }
  return o;
}

// 4. The M/M/1/1 average does not depend on the decision rate.
Outcome nu_independence() {
  Outcome o;
  std::vector<std::pair<double, double>> bands;
  for (double nu : {0.5, 5.0, 50.0}) {
    const auto est = replicate(
        config(1.0, ServiceKind::Exponential, 1.0, DecisionModel::poisson(nu), 2'000'000, 4004), 8);
    const double lo = est.avg_aud - 5 * est.aud_stderr, hi = est.avg_aud + 5 * est.aud_stderr;
    if (!(lo <= 2.5 && 2.5 <= hi)) o.fail("nu=" + fmt(nu) + ": " + fmt(est.avg_aud) + " +- " + fmt(5 * est.aud_stderr, 3));
    bands.emplace_back(lo, hi);
    o.detail += (o.detail.empty() ? "" : ", ") + std::string("nu=") + fmt(nu) + ": " + fmt(est.avg_aud);
  }
  for (std::size_t i = 0; i < bands.size(); ++i) {
    for (std::size_t j = i + 1; j < bands.size(); ++j) {
      if (bands[i].second < bands[j].first || bands[j].second < bands[i].first) o.fail("bands do not overlap");
    }
  }
  return o;
}

// 5. Ordering statements as property suites.
Outcome orderings() {
  Outcome o;
  std::mt19937_64 gen(5005);
  std::uniform_real_distribution<double> rate(0.1, 10.0);
  std::uniform_real_distribution<double> load(0.001, 0.999);
  const std::vector<std::string> expected{"M/D/1/1-M", "M/U/1/1-M", "M/M/1/1-M"};

  int order_violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto v = ordering_m(rate(gen), rate(gen), rate(gen));
    if (!v.aud.strict || v.aud.relation != expected) ++order_violations;
    if (!v.pmis.strict || v.pmis.relation != expected) ++order_violations;
  }
  if (order_violations) o.fail(std::to_string(order_violations) + " D < U < M violations");

  int buffer_violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const double mu = rate(gen), nu = rate(gen), lambda = load(gen) * mu;
    for (auto k : kKinds) {
      const auto s = ServiceModel::named(k, mu);
      if (!(pmis_mg11_m(lambda, nu, s) <= pmis_mg1_m_infinite(lambda, nu, s))) ++buffer_violations;
    }
  }
  if (buffer_violations) o.fail(std::to_string(buffer_violations) + " bufferless > buffered pmis");

  const auto star = find_m0_star(1.0, 1.0, 1000);
  constexpr int kStarFixture = 7;
  if (star != kStarFixture) o.fail("m0* = " + (star ? std::to_string(*star) : std::string("none")));
  int crossing_violations = 0;
  for (int m0 = 1; m0 <= 1000; ++m0) {
    const double u = *aud_specialized_d(1.0, 1.0, m0, ServiceKind::Uniform).avg_aud;
    const double e = *aud_specialized_d(1.0, 1.0, m0, ServiceKind::Exponential).avg_aud;
    const double d = *aud_specialized_d(1.0, 1.0, m0, ServiceKind::Deterministic).avg_aud;
    if (m0 <= kStarFixture ? !(u >= e) : !(u < e)) ++crossing_violations;
    if (!(d < std::min(u, e))) ++crossing_violations;
  }
  if (crossing_violations) o.fail(std::to_string(crossing_violations) + " two-case ordering violations");

  double worst_limit = 0.0;
  int monotone_violations = 0;
  for (auto k : kKinds) {
    double prev = INFINITY;
    for (int m0 = 1; m0 <= 1000; ++m0) {
      const double v = *aud_specialized_d(1.0, 1.0, m0, k).avg_aud;
      if (!(v < prev)) ++monotone_violations;
      prev = v;
    }
    worst_limit = std::max(worst_limit, rel(*aud_specialized_d(1.0, 1.0, 1'000'000, k).avg_aud,
                                            aud_specialized_m(1.0, 1.0, k)));
  }
  if (monotone_violations) o.fail(std::to_string(monotone_violations) + " non-decreasing steps in m0");
  if (!(worst_limit < 1e-5)) o.fail("m0 = 1e6 limit off by " + fmt(worst_limit));
  if (o.pass) {
    o.detail = "0 violations over 2000 + 3000 draws; m0* = " + std::to_string(*star) +
               "; m0 = 1e6 limit rel err " + fmt(worst_limit, 3);
  }
  return o;
}

struct FigureRun {
  FigureId figure;
  std::string csv;
  VerifyReport report;
};

std::vector<FigureRun> figure_runs;

std::string sweep_csv(const SweepSpec& spec) {
  std::ostringstream out;
  write_csv(run_sweep(spec), out);
  return out.str();
}

// 6. Qualitative claims of the figure sweeps.
Outcome figure_claims() {
  Outcome o;
  std::size_t claims = 0;
  for (auto f : {FigureId::AudVsRhoM, FigureId::PmisVsNuM, FigureId::AudVsRhoD, FigureId::PmisVsNuD,
                 FigureId::DecisionCompare}) {
    const auto spec = default_sweep(f);
    const auto table = run_sweep(spec);
    std::ostringstream csv;
    write_csv(table, csv);
    const auto report = verify(f, table, spec.tolerance);
    for (const auto& c : report.claims) {
      ++claims;
      if (!c.pass) o.fail(std::string(to_string(f)) + ": " + c.name + " (" + c.detail + ")");
    }
    std::string note = std::string(to_string(f)) + " rows within tolerance: " +
                       std::to_string(report.rows_checked - report.failures.size()) + "/" +
                       std::to_string(report.rows_checked);
    if (report.max_approx_gap_aud) note += ", max approx AuD gap " + fmt(100 * *report.max_approx_gap_aud, 3) + "%";
    o.notes.push_back(note);
    figure_runs.push_back({f, csv.str(), report});
  }
  if (o.pass) o.detail = std::to_string(claims) + " claims hold across 5 figure sweeps";
  return o;
}

// 7. Byte-identical re-runs.
Outcome determinism() {
  Outcome o;
  for (const auto& run : figure_runs) {
    auto spec = default_sweep(run.figure);
    spec.threads = 1;
    if (sweep_csv(spec) != run.csv) o.fail(std::string(to_string(run.figure)) + " differs on re-run");
  }
  auto bar = default_sweep(FigureId::SummaryBar);
  if (sweep_csv(bar) != sweep_csv(bar)) o.fail("fig_summary_bar differs on re-run");
  if (figure_runs.empty()) o.fail("no sweeps to compare");
  if (o.pass) o.detail = std::to_string(figure_runs.size() + 1) + " sweeps re-run byte-identically";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"1 closed-form cross-consistency", closed_form_consistency},
      {"2 simulation vs exact formulas", exact_formulas},
      {"3 approximation audit at m0 = 30", approximation_audit},
      {"4 AuD independent of decision rate", nu_independence},
      {"5 ordering property suites", orderings},
      {"6 figure sweep claims", figure_claims},
      {"7 deterministic sweeps", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    for (const auto& n : o.notes) std::printf("       note: %s\n", n.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
