#include "aud/stochastic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace aud {

namespace {

void require_rate(double rate, const char* what) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument(std::string(what) + " must be a positive finite rate");
  }
}

// (1 - exp(-x)) / x, with the removable singularity at x = 0.
double one_minus_exp_over(double x) {
  if (x < 1e-6) {
    return 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0;
  }
  return -std::expm1(-x) / x;
}

}  // namespace

std::string_view to_string(ServiceKind kind) {
  switch (kind) {
    case ServiceKind::Uniform: return "uniform";
    case ServiceKind::Exponential: return "exp";
    case ServiceKind::Deterministic: return "det";
    case ServiceKind::GeneralMoments: return "general";
  }
  return "?";
}

char kendall_code(ServiceKind kind) {
  switch (kind) {
    case ServiceKind::Uniform: return 'U';
    case ServiceKind::Exponential: return 'M';
    case ServiceKind::Deterministic: return 'D';
    case ServiceKind::GeneralMoments: return 'G';
  }
  return '?';
}

std::string_view to_string(DecisionKind kind) {
  return kind == DecisionKind::Poisson ? "poisson" : "periodic";
}

ServiceModel ServiceModel::named(ServiceKind kind, double mu) {
  require_rate(mu, "service rate mu");
  if (kind == ServiceKind::GeneralMoments) {
    throw std::invalid_argument("GeneralMoments service needs explicit moments");
  }
  ServiceModel s;
  s.kind_ = kind;
  s.mu_ = mu;
  s.mean_ = 1.0 / mu;
  switch (kind) {
    case ServiceKind::Uniform: s.second_moment_ = 4.0 / (3.0 * mu * mu); break;
    case ServiceKind::Exponential: s.second_moment_ = 2.0 / (mu * mu); break;
    default: s.second_moment_ = 1.0 / (mu * mu); break;
  }
  return s;
}

ServiceModel ServiceModel::uniform(double mu) { return named(ServiceKind::Uniform, mu); }
ServiceModel ServiceModel::exponential(double mu) { return named(ServiceKind::Exponential, mu); }
ServiceModel ServiceModel::deterministic(double mu) { return named(ServiceKind::Deterministic, mu); }

ServiceModel ServiceModel::general(double mean, double second_moment, MgfNeg mgf_neg,
                                   Sampler sampler) {
  if (!std::isfinite(mean) || !std::isfinite(second_moment)) {
    throw std::invalid_argument("service moments must be finite");
  }
  if (!(mean > 0.0)) {
    throw std::invalid_argument("service mean must be positive");
  }
  // Jensen, with a little slack for moments computed in floating point.
  if (second_moment < mean * mean * (1.0 - 1e-12)) {
    throw std::invalid_argument("second moment below mean^2");
  }
  if (!mgf_neg) {
    throw std::invalid_argument("GeneralMoments service needs an MGF");
  }
  ServiceModel s;
  s.kind_ = ServiceKind::GeneralMoments;
  s.mu_ = 1.0 / mean;
  s.mean_ = mean;
  s.second_moment_ = second_moment;
  s.mgf_neg_ = std::move(mgf_neg);
  s.sampler_ = std::move(sampler);
  return s;
}

bool ServiceModel::has_sampler() const {
  return kind_ != ServiceKind::GeneralMoments || static_cast<bool>(sampler_);
}

ArrivalModel::ArrivalModel(double rate) : lambda(rate) { require_rate(rate, "arrival rate lambda"); }

DecisionModel DecisionModel::poisson(double nu) {
  require_rate(nu, "decision rate nu");
  return {DecisionKind::Poisson, nu, std::nullopt};
}

DecisionModel DecisionModel::periodic(double nu, std::optional<double> phase) {
  require_rate(nu, "decision rate nu");
  if (phase && !(*phase >= 0.0 && *phase < 1.0 / nu)) {
    throw std::invalid_argument("periodic phase must lie in [0, 1/nu)");
  }
  return {DecisionKind::Periodic, nu, phase};
}

ServiceMoments service_moments(const ServiceModel& s) { return {s.mean_, s.second_moment_}; }

double service_mgf_neg(const ServiceModel& s, double nu) {
  if (!(nu >= 0.0)) {
    throw std::invalid_argument("MGF argument nu must be >= 0");
  }
  switch (s.kind_) {
    case ServiceKind::Uniform: return one_minus_exp_over(2.0 * nu / s.mu_);
    case ServiceKind::Exponential: return s.mu_ / (s.mu_ + nu);
    case ServiceKind::Deterministic: return std::exp(-nu / s.mu_);
    case ServiceKind::GeneralMoments: return nu == 0.0 ? 1.0 : s.mgf_neg_(nu);
  }
  return 1.0;
}

double sample_exponential(double rate, RngStream& rng) {
  return -std::log(rng.uniform_open()) / rate;
}

double sample(const ServiceModel& s, RngStream& rng) {
  switch (s.kind_) {
    case ServiceKind::Uniform: return rng.uniform_open() * (2.0 / s.mu_);
    case ServiceKind::Exponential: return sample_exponential(s.mu_, rng);
    case ServiceKind::Deterministic: return 1.0 / s.mu_;
    case ServiceKind::GeneralMoments:
      if (!s.sampler_) throw std::logic_error("no sampler available");
      return s.sampler_(rng);
  }
  return 0.0;
}

double sample(const ArrivalModel& a, RngStream& rng) { return sample_exponential(a.lambda, rng); }

double sample(const DecisionModel& d, RngStream& rng) {
  if (d.kind == DecisionKind::Periodic) return 1.0 / d.nu;
  return sample_exponential(d.nu, rng);
}

}  // namespace aud
