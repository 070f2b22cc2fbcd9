#pragma once

// Parameter sweeps that pair closed-form values with simulation estimates,
// one sweep per figure of the bufferless AuD study, plus the tolerance
// harness that turns a sweep into a pass/fail report.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aud/analytic.hpp"
#include "aud/simulator.hpp"

namespace aud {

enum class FigureId {
  AudVsRhoM,        // fig_aud_vs_rho_M
  PmisVsNuM,        // fig_pmis_vs_nu_M
  AudVsRhoD,        // fig_aud_vs_rho_D
  PmisVsNuD,        // fig_pmis_vs_nu_D
  DecisionCompare,  // fig_decision_compare
  SummaryBar,       // fig_summary_bar
};

std::string_view to_string(FigureId f);
std::optional<FigureId> parse_figure(std::string_view name);
const std::vector<FigureId>& all_figures();

/// Exact-formula rows must agree within k standard errors. Approximate rows
/// pass within k standard errors or within a relative band.
struct TolerancePolicy {
  double k_stderr = 5.0;
  double approx_rel = 0.05;
};

struct SweepSpec {
  FigureId figure = FigureId::AudVsRhoM;
  double mu = 1.5;     // service rate, fixed in every sweep
  double rho = 0.5;    // load, for decision-rate sweeps
  double nu = 1.5;     // Poisson decision rate, for load sweeps
  int m0 = 30;         // nu = m0 mu, for periodic-decision load sweeps
  std::vector<double> grid;
  bool include_baselines = true;  // FCFS infinite-buffer rows

  std::uint64_t horizon = 200'000;
  std::uint64_t warmup = 1'000;
  std::uint64_t reps = 4;
  std::uint64_t seed = 20230101;
  TolerancePolicy tolerance;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
};

SweepSpec default_sweep(FigureId figure);

/// Evenly spaced grid from `first` to `last` inclusive: first + i * step,
/// rounded to 12 decimal places.
std::vector<double> linear_grid(double first, double last, double step);

struct SweepRow {
  double swept = 0.0;
  std::string system;
  ServiceKind service = ServiceKind::Deterministic;
  Discipline discipline = Discipline::Blocking1;
  DecisionKind decision = DecisionKind::Poisson;

  std::optional<double> analytic_aud;
  std::optional<Exactness> aud_exactness;
  std::optional<double> analytic_pmis;
  std::optional<Exactness> pmis_exactness;

  std::optional<double> sim_aud;
  std::optional<double> sim_aud_stderr;
  std::optional<double> sim_pmis;
  std::optional<double> sim_pmis_stderr;

  std::optional<double> rel_dev_aud;
  std::optional<double> rel_dev_pmis;
  /// Empty when the row has nothing to compare.
  std::optional<bool> pass;
  std::string error;
};

using SweepTable = std::vector<SweepRow>;

/// Runs every grid point and system variant of the figure. A failing row
/// keeps its error message and the sweep continues.
SweepTable run_sweep(const SweepSpec& spec);

/// Which metrics a figure is judged on.
struct FigureMetrics {
  bool aud;
  bool pmis;
};
FigureMetrics figure_metrics(FigureId f);

/// Recomputes deviations and the pass flag of one row.
void evaluate_row(SweepRow& row, const TolerancePolicy& policy, FigureMetrics metrics);

inline constexpr const char* kCsvHeader =
    "swept,system,discipline,decision,analytic_aud,sim_aud,sim_aud_stderr,analytic_pmis,sim_pmis,"
    "sim_pmis_stderr,rel_dev_aud,rel_dev_pmis,pass";

void write_csv(const SweepTable& table, std::ostream& out);
void emit_csv(const SweepTable& table, const std::filesystem::path& path);
/// Parses a table written by write_csv. Exactness is reconstructed from the
/// system label; per-row error text is not stored in the file.
SweepTable read_csv(std::istream& in);

struct ClaimResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Qualitative statements each figure is expected to show.
std::vector<ClaimResult> check_claims(FigureId figure, const SweepTable& table);

struct VerifyReport {
  FigureId figure = FigureId::AudVsRhoM;
  bool pass = false;
  std::size_t rows_checked = 0;
  std::vector<std::string> failures;
  /// Largest relative |sim - analytic| over approximate-formula AuD rows.
  std::optional<double> max_approx_gap_aud;
  /// Largest absolute |sim - analytic| over approximate-formula p_mis rows
  /// (relative gaps are meaningless once the probability is ~0).
  std::optional<double> max_approx_gap_pmis;
  /// Largest |sim - analytic| / stderr over exact-formula rows.
  std::optional<double> max_exact_z;
  std::vector<ClaimResult> claims;

  std::string summary() const;
};

VerifyReport verify(FigureId figure, const SweepTable& table, const TolerancePolicy& policy);

}  // namespace aud
