#include "aud/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace aud {

namespace {

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

void require_m0(int m0) {
  if (m0 < 1) throw std::invalid_argument("m0 must be a positive integer");
}

void require_named(ServiceKind kind) {
  if (kind == ServiceKind::GeneralMoments) {
    throw std::invalid_argument("specialised formula needs a uniform, exponential or deterministic law");
  }
}

std::string label_suffix(ServiceKind kind, char decision) {
  return std::string("M") + kendall_code(kind) + "11" + decision;
}

// 1 - exp(-x) without cancellation.
double one_minus_exp(double x) { return -std::expm1(-x); }

// (1 + e^{-x}) / (1 - e^{-x})
double coth_ratio(double x) { return (1.0 + std::exp(-x)) / one_minus_exp(x); }

double clamp_probability(double p) {
  constexpr double kSlack = 1e-12;
  if (p < -kSlack || p > 1.0 + kSlack || !std::isfinite(p)) {
    throw std::domain_error("missing probability outside [0, 1]: " + std::to_string(p));
  }
  return std::clamp(p, 0.0, 1.0);
}

OrderingVerdict order_three(const std::array<std::pair<std::string, double>, 3>& values) {
  auto sorted = values;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second < b.second; });
  OrderingVerdict v;
  v.strict = true;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    v.relation.push_back(sorted[i].first);
    if (i > 0 && !(sorted[i - 1].second < sorted[i].second)) v.strict = false;
  }
  return v;
}

}  // namespace

std::string_view to_string(Exactness e) {
  return e == Exactness::Exact ? "exact" : "uniform-epoch-approx";
}

std::string system_label(ServiceKind service, DecisionKind decision, bool blocking) {
  std::string label = "M/";
  label += kendall_code(service);
  label += blocking ? "/1/1-" : "/1-";
  label += decision == DecisionKind::Poisson ? 'M' : 'D';
  return label;
}

AnalyticReport aud_mg11_m(double lambda, const ServiceModel& service) {
  require_positive(lambda, "lambda");
  const auto [mean, second] = service_moments(service);
  if (!std::isfinite(second)) throw std::invalid_argument("non-finite second moment");
  const double mu = 1.0 / mean;
  const double value = lambda * mu * second / (2.0 * (lambda + mu)) + (lambda + mu) / (lambda * mu);
  return {value, std::nullopt, Exactness::Exact, "aud-MG11M"};
}

double aud_specialized_m(double lambda, double mu, ServiceKind kind) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  require_named(kind);
  const double rho = lambda / mu;
  const double denom = lambda * (1.0 + rho);
  switch (kind) {
    case ServiceKind::Uniform: return (3.0 + 6.0 * rho + 5.0 * rho * rho) / (3.0 * denom);
    case ServiceKind::Exponential: return (1.0 + 2.0 * rho + 2.0 * rho * rho) / denom;
    default: return (2.0 + 4.0 * rho + 3.0 * rho * rho) / (2.0 * denom);
  }
}

double pmis_mg11_m(double lambda, double nu, const ServiceModel& service) {
  require_positive(lambda, "lambda");
  require_positive(nu, "nu");
  return lambda / (lambda + nu) * service_mgf_neg(service, nu);
}

double pmis_mg1_m_infinite(double lambda, double nu, const ServiceModel& service) {
  require_positive(lambda, "lambda");
  require_positive(nu, "nu");
  const double rho = lambda * service_moments(service).mean;
  if (!(rho < 1.0)) throw std::invalid_argument("FCFS infinite buffer needs rho < 1");
  return service_mgf_neg(service, nu) * (rho * nu + lambda) / (lambda + nu);
}

DecisionCountMoments decision_count_moments(double lambda, double mu, int m0, ServiceKind kind) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  require_m0(m0);
  require_named(kind);
  const double nu = m0 * mu;
  const double m = m0;

  DecisionCountMoments out{};
  // Idle period: exponential residual inter-arrival time.
  out.e_n1 = nu / lambda;
  out.e_n1_sq = nu / lambda * coth_ratio(lambda / nu);
  switch (kind) {
    case ServiceKind::Uniform:
      out.e_n2 = (2.0 * m + 1.0) / 2.0;
      out.e_n2_sq = (2.0 * m + 1.0) * (2.0 * m + 2.0) * (4.0 * m + 3.0) / (12.0 * m);
      break;
    case ServiceKind::Exponential:
      out.e_n2 = nu / mu;
      out.e_n2_sq = nu / mu * coth_ratio(mu / nu);
      break;
    default:
      out.e_n2 = m;
      out.e_n2_sq = m * m;
      break;
  }
  return out;
}

double aud_mg11_d_general(double e_t_prev, double e_y, double nu, const DecisionCountMoments& m) {
  require_positive(e_t_prev, "E[T]");
  require_positive(e_y, "E[Y]");
  require_positive(nu, "nu");
  const double first = e_t_prev * (m.e_n1 + m.e_n2) / (nu * e_y);
  const double second = (m.e_n1_sq + m.e_n2_sq + 2.0 * m.e_n1 * m.e_n2) / (2.0 * nu * nu * e_y);
  return first + second;
}

AnalyticReport aud_specialized_d(double lambda, double mu, int m0, ServiceKind kind) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  require_m0(m0);
  require_named(kind);
  const double rho = lambda / mu;
  const double m = m0;
  const double nu = m * mu;
  const double idle_term = coth_ratio(lambda / nu) / (2.0 * mu * m * (1.0 + rho));

  double value = 0.0;
  switch (kind) {
    case ServiceKind::Uniform:
      value = (2.0 * rho * m + 4.0 * m + rho + 1.0) / (2.0 * mu * m * (1.0 + rho)) + idle_term +
              rho * (8.0 * m * m * m + 18.0 * m * m + 13.0 * m + 3.0) /
                  (12.0 * mu * m * m * m * (1.0 + rho));
      break;
    case ServiceKind::Exponential:
      value = (2.0 + rho) / (mu * (1.0 + rho)) +
              rho * coth_ratio(mu / nu) / (2.0 * mu * m * (1.0 + rho)) + idle_term;
      break;
    default:
      value = (4.0 + 3.0 * rho) / (2.0 * mu * (1.0 + rho)) + idle_term;
      break;
  }
  return {value, std::nullopt, Exactness::UniformEpochApprox, "aud-" + label_suffix(kind, 'D')};
}

AnalyticReport pmis_mg11_d(double lambda, double mu, int m0, ServiceKind kind) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  require_m0(m0);
  require_named(kind);
  const double rho = lambda / mu;
  const double m = m0;
  const double nu = m * mu;
  const std::string id = "pmis-" + label_suffix(kind, 'D');

  switch (kind) {
    case ServiceKind::Uniform: {
      const double p = 1.0 / (4.0 * m) + (m * one_minus_exp(lambda / nu) - rho) / (2.0 * rho * rho);
      return {std::nullopt, clamp_probability(p), Exactness::UniformEpochApprox, id};
    }
    case ServiceKind::Exponential: {
      if (std::abs(rho - 1.0) < 1e-9) {
        throw std::invalid_argument("exponential periodic missing probability is singular at rho = 1");
      }
      const double alpha = std::exp(-mu / nu);
      const double beta = std::exp(-lambda / nu);
      const double p = m * (alpha - beta) / (rho * (rho - 1.0)) +
                       (rho - m - rho * m) * one_minus_exp(mu / nu) / rho + alpha;
      return {std::nullopt, clamp_probability(p), Exactness::UniformEpochApprox, id};
    }
    default:
      // Every inter-departure interval is at least 1/mu = m0/nu long.
      return {std::nullopt, 0.0, Exactness::Exact, id};
  }
}

std::optional<int> find_m0_star(double lambda, double mu, int m0_max) {
  if (m0_max < 1) throw std::invalid_argument("m0_max must be >= 1");
  int last_not_below = 0;
  for (int m0 = 1; m0 <= m0_max; ++m0) {
    const double u = *aud_specialized_d(lambda, mu, m0, ServiceKind::Uniform).avg_aud;
    const double e = *aud_specialized_d(lambda, mu, m0, ServiceKind::Exponential).avg_aud;
    if (u >= e) last_not_below = m0;
  }
  if (last_not_below == m0_max) return std::nullopt;
  return last_not_below;
}

OrderingM ordering_m(double lambda, double mu, double nu) {
  OrderingM out;
  const std::array<ServiceKind, 3> kinds{ServiceKind::Deterministic, ServiceKind::Uniform,
                                         ServiceKind::Exponential};
  std::array<std::pair<std::string, double>, 3> aud{};
  std::array<std::pair<std::string, double>, 3> pmis{};
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const auto label = system_label(kinds[i], DecisionKind::Poisson, true);
    aud[i] = {label, aud_specialized_m(lambda, mu, kinds[i])};
    pmis[i] = {label, pmis_mg11_m(lambda, nu, ServiceModel::named(kinds[i], mu))};
  }
  out.aud = order_three(aud);
  out.pmis = order_three(pmis);
  return out;
}

OrderingVerdict ordering_d(double lambda, double mu, int m0) {
  const std::array<ServiceKind, 3> kinds{ServiceKind::Deterministic, ServiceKind::Uniform,
                                         ServiceKind::Exponential};
  std::array<std::pair<std::string, double>, 3> aud{};
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    aud[i] = {system_label(kinds[i], DecisionKind::Periodic, true),
              *aud_specialized_d(lambda, mu, m0, kinds[i]).avg_aud};
  }
  return order_three(aud);
}

std::optional<int> integer_m0(double nu, double mu) {
  const double ratio = nu / mu;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) return std::nullopt;
  return static_cast<int>(rounded);
}

SystemAnalytic analyze_system(double lambda, const ServiceModel& service,
                              const DecisionModel& decision, bool blocking) {
  SystemAnalytic out;
  const double mean = service_moments(service).mean;
  const double rho = lambda * mean;

  if (decision.kind == DecisionKind::Poisson) {
    if (blocking) {
      out.aud = aud_mg11_m(lambda, service);
      out.pmis = AnalyticReport{std::nullopt, pmis_mg11_m(lambda, decision.nu, service),
                                Exactness::Exact, "pmis-MG11M"};
    } else if (rho < 1.0) {
      out.pmis = AnalyticReport{std::nullopt, pmis_mg1_m_infinite(lambda, decision.nu, service),
                                Exactness::Exact, "pmis-MG1M"};
    }
    return out;
  }

  if (!blocking || service.kind() == ServiceKind::GeneralMoments) return out;
  const auto m0 = integer_m0(decision.nu, service.mu());
  if (!m0) return out;
  out.aud = aud_specialized_d(lambda, service.mu(), *m0, service.kind());
  try {
    out.pmis = pmis_mg11_d(lambda, service.mu(), *m0, service.kind());
  } catch (const std::invalid_argument&) {
    // rho == 1 singularity of the exponential case: no value.
  }
  return out;
}

}  // namespace aud
