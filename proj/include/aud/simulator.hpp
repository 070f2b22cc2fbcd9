#pragma once

// Discrete-event simulation of the update-and-decision pipeline: Poisson
// update generation, one server, either a length-1 blocking queue or an
// FCFS infinite buffer, and Poisson or periodic decision epochs.
//
// At each decision epoch the age upon decision is the epoch time minus the
// generation time of the most recently departed update. An update is
// "missed" when no decision falls in [its departure, next departure).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aud/stochastic.hpp"

namespace aud {

enum class Discipline { Blocking1, FcfsInfinite };

std::string_view to_string(Discipline d);

struct SystemSpec {
  ArrivalModel arrival;
  ServiceModel service;
  DecisionModel decision;
  Discipline discipline = Discipline::Blocking1;

  double rho() const;
};

struct SimRunConfig {
  SystemSpec spec;
  /// Decisions after the first departure, including the warm-up ones.
  std::uint64_t horizon = 2'000'000;
  /// Post-departure decisions discarded before measuring.
  std::uint64_t warmup = 1'000;
  std::uint64_t seed = 1;
};

struct SimEstimate {
  double avg_aud = 0.0;
  double missing_prob = 0.0;
  double aud_stderr = 0.0;
  double pmis_stderr = 0.0;

  std::uint64_t n_decisions = 0;       // measured decisions
  std::uint64_t n_generated = 0;       // arrivals inside the measurement window
  std::uint64_t n_successful = 0;      // of those, admitted to the server
  std::uint64_t n_dropped = 0;         // of those, blocked (Blocking1 only)
  std::uint64_t n_intervals = 0;       // completed inter-departure intervals
  std::uint64_t n_missed_updates = 0;  // of those, with no decision inside

  double mean_interdeparture = 0.0;
  double measured_time = 0.0;
  std::uint64_t max_queue_length = 0;  // in system, including the one in service
  std::uint64_t n_replications = 1;
};

/// One replication on substream 0 of the configured seed.
SimEstimate run(const SimRunConfig& config);

/// One replication on an explicit substream.
SimEstimate run_substream(const SimRunConfig& config, std::uint64_t substream_id);

/// n_reps independent replications on substreams 0..n_reps-1, pooled.
/// The pooled standard errors come from batch means gathered across all
/// replications, so they shrink like 1/sqrt(n_reps).
SimEstimate replicate(const SimRunConfig& config, std::uint64_t n_reps);

enum class TraceEventType { Arrival, Drop, Departure, Decision };

std::string_view to_string(TraceEventType t);

/// value: Arrival -> 1, Drop -> 0, Departure -> generation time of the
/// departing update, Decision -> age upon decision (NaN before the first
/// departure).
struct TraceRecord {
  TraceEventType type;
  double time;
  double value;
};

struct EventTrace {
  std::vector<TraceRecord> records;

  /// One line per record: event_type<TAB>time<TAB>value.
  void write(std::ostream& out) const;
  static EventTrace read(std::istream& in);
};

/// Event log from time 0 (no warm-up) of the first max_events records.
EventTrace trace(const SimRunConfig& config, std::size_t max_events);

}  // namespace aud
