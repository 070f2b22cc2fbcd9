#pragma once

// Closed-form Age-upon-Decisions (AuD) and missing-probability results for
// the bufferless M/G/1/1 update-and-decision queue.
//
// Naming: "-M" systems make decisions at Poisson epochs, "-D" systems make
// them periodically with nu = m0 * mu. The -D AuD formulas and the U/M -D
// missing probabilities rest on a uniform-decision-epoch approximation and
// are flagged UniformEpochApprox.

#include <optional>
#include <string>
#include <vector>

#include "aud/stochastic.hpp"

namespace aud {

enum class Exactness { Exact, UniformEpochApprox };

std::string_view to_string(Exactness e);

struct AnalyticReport {
  std::optional<double> avg_aud;
  std::optional<double> missing_prob;
  Exactness exactness = Exactness::Exact;
  std::string formula_id;
};

/// First and second moments of the number of decisions made before (N1) and
/// after (N2) the arrival of a successful update within its inter-departure
/// interval.
struct DecisionCountMoments {
  double e_n1;
  double e_n1_sq;
  double e_n2;
  double e_n2_sq;
};

struct OrderingVerdict {
  std::vector<std::string> relation;  // smallest first
  bool strict = false;
};

// --- Poisson decisions -------------------------------------------------------

/// Average AuD of M/G/1/1-M: lambda mu E[S^2] / (2(lambda+mu)) + (lambda+mu)/(lambda mu).
/// There is no decision-rate argument: the value does not depend on nu.
AnalyticReport aud_mg11_m(double lambda, const ServiceModel& service);

/// Specialised U/M/D forms of aud_mg11_m written in terms of rho = lambda/mu.
double aud_specialized_m(double lambda, double mu, ServiceKind kind);

/// Missing probability of M/G/1/1-M: lambda/(lambda+nu) * G_S(-nu).
double pmis_mg11_m(double lambda, double nu, const ServiceModel& service);

/// Missing probability of the FCFS infinite-buffer M/G/1-M queue,
/// G_S(-nu) (rho nu + lambda)/(lambda + nu), with rho = lambda E[S] < 1.
double pmis_mg1_m_infinite(double lambda, double nu, const ServiceModel& service);

// --- Periodic decisions ------------------------------------------------------

DecisionCountMoments decision_count_moments(double lambda, double mu, int m0, ServiceKind kind);

/// General periodic-decision AuD from the mean system time of the previous
/// update, the mean inter-departure time and the decision-count moments.
double aud_mg11_d_general(double e_t_prev, double e_y, double nu, const DecisionCountMoments& m);

/// Specialised U/M/D periodic-decision AuD (UniformEpochApprox).
AnalyticReport aud_specialized_d(double lambda, double mu, int m0, ServiceKind kind);

/// Periodic-decision missing probability. Exact zero for deterministic
/// service; approximate for U and M. The M case has a removable singularity
/// at rho = 1 and rejects |rho - 1| < 1e-9.
AnalyticReport pmis_mg11_d(double lambda, double mu, int m0, ServiceKind kind);

/// Smallest m0* such that the uniform-service periodic AuD is below the
/// exponential one for every m0 > m0* and not below it for m0 <= m0*, found
/// by scanning 1..m0_max. Empty when no sign change occurs in range.
std::optional<int> find_m0_star(double lambda, double mu, int m0_max);

// --- Orderings ---------------------------------------------------------------

struct OrderingM {
  OrderingVerdict aud;
  OrderingVerdict pmis;
};

/// Orders the U/M/D bufferless Poisson-decision systems by AuD and by
/// missing probability at a common (lambda, mu, nu).
OrderingM ordering_m(double lambda, double mu, double nu);

/// Orders the periodic-decision systems by approximate AuD at m0.
OrderingVerdict ordering_d(double lambda, double mu, int m0);

// --- Convenience -------------------------------------------------------------

/// Extended Kendall label, e.g. "M/U/1/1-D" (blocking) or "M/M/1-M" (FCFS).
std::string system_label(ServiceKind service, DecisionKind decision, bool blocking);

/// Every in-scope closed form for one system; either field may be empty
/// (infinite-buffer AuD is never available, periodic decisions need an
/// integer m0 = nu/mu and a named service kind).
struct SystemAnalytic {
  std::optional<AnalyticReport> aud;
  std::optional<AnalyticReport> pmis;
};

SystemAnalytic analyze_system(double lambda, const ServiceModel& service,
                              const DecisionModel& decision, bool blocking);

/// nu/mu as an integer when it is one (to within 1e-9 relative), else empty.
std::optional<int> integer_m0(double nu, double mu);

}  // namespace aud
