#pragma once

#include <functional>
#include <optional>
#include <string_view>

#include "aud/rng.hpp"

namespace aud {

enum class ServiceKind { Uniform, Exponential, Deterministic, GeneralMoments };

std::string_view to_string(ServiceKind kind);
/// One-letter Kendall code: U, M, D, G.
char kendall_code(ServiceKind kind);

struct ServiceMoments {
  double mean;
  double second_moment;
};

/// Service-time law. Every named kind has mean 1/mu:
///   Uniform        on (0, 2/mu)
///   Exponential    with rate mu
///   Deterministic  point mass at 1/mu
/// A GeneralMoments law carries its mean, second moment and E[exp(-nu S)]
/// as data; a sampler is optional and only needed for simulation.
class ServiceModel {
 public:
  using MgfNeg = std::function<double(double)>;
  using Sampler = std::function<double(RngStream&)>;

  static ServiceModel uniform(double mu);
  static ServiceModel exponential(double mu);
  static ServiceModel deterministic(double mu);
  static ServiceModel named(ServiceKind kind, double mu);
  static ServiceModel general(double mean, double second_moment, MgfNeg mgf_neg,
                              Sampler sampler = {});

  ServiceKind kind() const { return kind_; }
  double mu() const { return mu_; }
  bool has_sampler() const;

 private:
  ServiceModel() = default;

  ServiceKind kind_ = ServiceKind::Deterministic;
  double mu_ = 1.0;
  double mean_ = 1.0;
  double second_moment_ = 1.0;
  MgfNeg mgf_neg_;
  Sampler sampler_;

  friend ServiceMoments service_moments(const ServiceModel& s);
  friend double service_mgf_neg(const ServiceModel& s, double nu);
  friend double sample(const ServiceModel& s, RngStream& rng);
};

/// Poisson update generation.
struct ArrivalModel {
  double lambda;

  explicit ArrivalModel(double rate);
};

enum class DecisionKind { Poisson, Periodic };

std::string_view to_string(DecisionKind kind);

/// Decision epochs: Poisson(nu), or phase + j/nu for j = 0, 1, 2, ...
/// An empty phase on a periodic model means "draw it uniformly on [0, 1/nu)
/// per replication".
struct DecisionModel {
  DecisionKind kind;
  double nu;
  std::optional<double> phase;

  static DecisionModel poisson(double nu);
  static DecisionModel periodic(double nu, std::optional<double> phase = std::nullopt);
};

/// (1/mu, E[S^2]); E[S^2] is 4/(3mu^2), 2/mu^2, 1/mu^2 for U, M, D.
ServiceMoments service_moments(const ServiceModel& s);

/// G_S(-nu) = E[exp(-nu S)] for nu >= 0.
double service_mgf_neg(const ServiceModel& s, double nu);

/// One service time. Throws std::logic_error("no sampler available") for a
/// moment-only GeneralMoments law.
double sample(const ServiceModel& s, RngStream& rng);
/// One inter-arrival time.
double sample(const ArrivalModel& a, RngStream& rng);
/// One inter-decision time (1/nu for periodic decisions).
double sample(const DecisionModel& d, RngStream& rng);

/// Exponential variate with the given rate.
double sample_exponential(double rate, RngStream& rng);

}  // namespace aud
