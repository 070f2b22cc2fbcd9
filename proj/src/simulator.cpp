#include "aud/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace aud {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kBatches = 64;

enum Lane : std::uint64_t { kArrivalLane = 0, kServiceLane = 1, kDecisionLane = 2, kPhaseLane = 3 };

struct Batch {
  double aud_sum = 0.0;
  std::uint64_t decisions = 0;
  std::uint64_t intervals = 0;
  std::uint64_t missed = 0;
};

struct RunResult {
  SimEstimate estimate;
  std::vector<Batch> batches;
  double interval_time = 0.0;
};

// Batch-means standard error of the ratio estimator sum(x)/sum(n).
template <class X, class N>
double ratio_stderr(const std::vector<Batch>& batches, X x, N n) {
  const std::size_t b = batches.size();
  if (b < 2) return 0.0;
  double sx = 0.0;
  double sn = 0.0;
  for (const auto& batch : batches) {
    sx += x(batch);
    sn += n(batch);
  }
  if (sn <= 0.0) return 0.0;
  const double ratio = sx / sn;
  double ss = 0.0;
  for (const auto& batch : batches) {
    const double r = x(batch) - ratio * n(batch);
    ss += r * r;
  }
  const double nbar = sn / static_cast<double>(b);
  return std::sqrt(ss / (static_cast<double>(b) * static_cast<double>(b - 1))) / nbar;
}

void finalize(RunResult& r) {
  auto& e = r.estimate;
  double aud_sum = 0.0;
  for (const auto& b : r.batches) aud_sum += b.aud_sum;
  e.avg_aud = e.n_decisions ? aud_sum / static_cast<double>(e.n_decisions) : 0.0;
  e.aud_stderr = ratio_stderr(
      r.batches, [](const Batch& b) { return b.aud_sum; },
      [](const Batch& b) { return static_cast<double>(b.decisions); });

  const double n = static_cast<double>(e.n_intervals);
  e.missing_prob = n > 0 ? static_cast<double>(e.n_missed_updates) / n : 0.0;
  double se = ratio_stderr(
      r.batches, [](const Batch& b) { return static_cast<double>(b.missed); },
      [](const Batch& b) { return static_cast<double>(b.intervals); });
  if (n > 0) {
    // Floor at the binomial standard error of a half-count estimate.
    const double p = (static_cast<double>(e.n_missed_updates) + 0.5) / (n + 1.0);
    se = std::max(se, std::sqrt(p * (1.0 - p) / n));
  }
  e.pmis_stderr = se;
  e.mean_interdeparture = n > 0 ? r.interval_time / n : 0.0;
}

void validate(const SimRunConfig& config) {
  if (config.warmup >= config.horizon) {
    throw std::invalid_argument("horizon too small: warmup must be below horizon");
  }
  if (!config.spec.service.has_sampler()) {
    throw std::invalid_argument("no sampler available for the service law");
  }
  if (config.spec.discipline == Discipline::FcfsInfinite && !(config.spec.rho() < 1.0)) {
    throw std::invalid_argument("FCFS infinite buffer is unstable for rho >= 1");
  }
}

struct NoTrace {
  static constexpr bool enabled = false;
  void operator()(TraceEventType, double, double) {}
  bool full() const { return false; }
};

struct TraceSink {
  static constexpr bool enabled = true;
  EventTrace* out;
  std::size_t max_events;
  void operator()(TraceEventType t, double time, double value) {
    if (out->records.size() < max_events) out->records.push_back({t, time, value});
  }
  bool full() const { return out->records.size() >= max_events; }
};

// Event loop shared by measurement runs and traces. Ties at equal timestamps
// resolve as departure, then decision, then arrival.
template <class Sink>
RunResult simulate(const SimRunConfig& config, std::uint64_t substream, Sink& sink) {
  const SystemSpec& spec = config.spec;
  const bool blocking = spec.discipline == Discipline::Blocking1;
  const bool periodic = spec.decision.kind == DecisionKind::Periodic;
  const double nu = spec.decision.nu;

  RngStream root(config.seed, substream);
  RngStream arrival_rng = root.lane(kArrivalLane);
  RngStream service_rng = root.lane(kServiceLane);
  RngStream decision_rng = root.lane(kDecisionLane);

  double phase = 0.0;
  if (periodic) {
    if (spec.decision.phase) {
      phase = *spec.decision.phase;
    } else {
      RngStream phase_rng = root.lane(kPhaseLane);
      phase = phase_rng.uniform_open() / nu;
    }
  }

  const std::uint64_t to_measure = config.horizon - config.warmup;
  const std::uint64_t n_batches = std::min<std::uint64_t>(kBatches, to_measure);

  RunResult result;
  result.batches.assign(static_cast<std::size_t>(n_batches), Batch{});
  SimEstimate& est = result.estimate;

  double t_arrival = sample(spec.arrival, arrival_rng);
  double t_departure = kInf;
  std::uint64_t decision_index = 0;
  double t_decision = periodic ? phase : sample(spec.decision, decision_rng);

  // Blocking1 keeps at most one update; FCFS keeps the whole queue.
  double in_service_gen = 0.0;
  std::deque<double> fcfs_queue;
  std::uint64_t in_system = 0;

  bool departed_once = false;
  double last_gen = std::numeric_limits<double>::quiet_NaN();
  double last_departure = 0.0;
  std::uint64_t decisions_in_interval = 0;
  bool interval_measured = false;

  bool measuring = false;
  double t_start = 0.0;
  std::uint64_t post_departure_decisions = 0;
  std::uint64_t measured = 0;
  std::size_t batch = 0;

  while (true) {
    if constexpr (Sink::enabled) {
      if (sink.full()) break;
    }

    if (t_departure <= t_decision && t_departure <= t_arrival) {
      const double now = t_departure;
      double gen;
      if (blocking) {
        gen = in_service_gen;
        t_departure = kInf;
      } else {
        gen = fcfs_queue.front();
        fcfs_queue.pop_front();
        t_departure = fcfs_queue.empty() ? kInf : now + sample(spec.service, service_rng);
      }
      --in_system;
      sink(TraceEventType::Departure, now, gen);

      if (departed_once && interval_measured) {
        auto& b = result.batches[batch];
        ++b.intervals;
        ++est.n_intervals;
        result.interval_time += now - last_departure;
        if (decisions_in_interval == 0) {
          ++b.missed;
          ++est.n_missed_updates;
        }
      }
      departed_once = true;
      last_gen = gen;
      last_departure = now;
      decisions_in_interval = 0;
      interval_measured = measuring;
    } else if (t_decision <= t_arrival) {
      const double now = t_decision;
      ++decision_index;
      t_decision = periodic ? phase + static_cast<double>(decision_index) / nu
                            : now + sample(spec.decision, decision_rng);
      if (!departed_once) {
        sink(TraceEventType::Decision, now, std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      const double age = now - last_gen;
      sink(TraceEventType::Decision, now, age);
      ++decisions_in_interval;
      ++post_departure_decisions;
      if constexpr (!Sink::enabled) {
        if (post_departure_decisions <= config.warmup) continue;
        if (!measuring) {
          measuring = true;
          t_start = now;
        }
        batch = static_cast<std::size_t>(measured * n_batches / to_measure);
        auto& b = result.batches[batch];
        b.aud_sum += age;
        ++b.decisions;
        ++measured;
        if (measured == to_measure) {
          est.measured_time = now - t_start;
          break;
        }
      }
    } else {
      const double now = t_arrival;
      t_arrival = now + sample(spec.arrival, arrival_rng);
      if (measuring) ++est.n_generated;
      if (blocking) {
        if (in_system == 0) {
          in_system = 1;
          in_service_gen = now;
          t_departure = now + sample(spec.service, service_rng);
          if (measuring) ++est.n_successful;
          sink(TraceEventType::Arrival, now, 1.0);
        } else {
          if (measuring) ++est.n_dropped;
          sink(TraceEventType::Drop, now, 0.0);
        }
      } else {
        if (fcfs_queue.empty()) t_departure = now + sample(spec.service, service_rng);
        fcfs_queue.push_back(now);
        ++in_system;
        if (measuring) ++est.n_successful;
        sink(TraceEventType::Arrival, now, 1.0);
      }
      est.max_queue_length = std::max(est.max_queue_length, in_system);
    }
  }

  est.n_decisions = measured;
  return result;
}

RunResult run_internal(const SimRunConfig& config, std::uint64_t substream) {
  validate(config);
  NoTrace sink;
  RunResult r = simulate(config, substream, sink);
  finalize(r);
  return r;
}

}  // namespace

std::string_view to_string(Discipline d) {
  return d == Discipline::Blocking1 ? "blocking1" : "fcfs";
}

std::string_view to_string(TraceEventType t) {
  switch (t) {
    case TraceEventType::Arrival: return "arrival";
    case TraceEventType::Drop: return "drop";
    case TraceEventType::Departure: return "departure";
    case TraceEventType::Decision: return "decision";
  }
  return "?";
}

double SystemSpec::rho() const { return arrival.lambda * service_moments(service).mean; }

SimEstimate run(const SimRunConfig& config) { return run_substream(config, 0); }

SimEstimate run_substream(const SimRunConfig& config, std::uint64_t substream_id) {
  return run_internal(config, substream_id).estimate;
}

SimEstimate replicate(const SimRunConfig& config, std::uint64_t n_reps) {
  if (n_reps < 1) throw std::invalid_argument("n_reps must be >= 1");
  RunResult pooled;
  auto& p = pooled.estimate;
  for (std::uint64_t rep = 0; rep < n_reps; ++rep) {
    RunResult r = run_internal(config, rep);
    const auto& e = r.estimate;
    p.n_decisions += e.n_decisions;
    p.n_generated += e.n_generated;
    p.n_successful += e.n_successful;
    p.n_dropped += e.n_dropped;
    p.n_intervals += e.n_intervals;
    p.n_missed_updates += e.n_missed_updates;
    p.measured_time += e.measured_time;
    p.max_queue_length = std::max(p.max_queue_length, e.max_queue_length);
    pooled.interval_time += r.interval_time;
    pooled.batches.insert(pooled.batches.end(), r.batches.begin(), r.batches.end());
  }
  p.n_replications = n_reps;
  finalize(pooled);
  return p;
}

EventTrace trace(const SimRunConfig& config, std::size_t max_events) {
  if (!config.spec.service.has_sampler()) {
    throw std::invalid_argument("no sampler available for the service law");
  }
  if (config.spec.discipline == Discipline::FcfsInfinite && !(config.spec.rho() < 1.0)) {
    throw std::invalid_argument("FCFS infinite buffer is unstable for rho >= 1");
  }
  EventTrace out;
  if (max_events == 0) return out;
  SimRunConfig cfg = config;
  cfg.warmup = 0;
  cfg.horizon = std::numeric_limits<std::uint64_t>::max();
  TraceSink sink{&out, max_events};
  simulate(cfg, 0, sink);
  return out;
}

void EventTrace::write(std::ostream& out) const {
  char buf[64];
  for (const auto& r : records) {
    out << to_string(r.type) << '\t';
    auto res = std::to_chars(buf, buf + sizeof buf, r.time);
    out.write(buf, res.ptr - buf) << '\t';
    if (std::isnan(r.value)) {
      out << "nan";
    } else {
      res = std::to_chars(buf, buf + sizeof buf, r.value);
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

namespace {
double parse_field(const std::string& s, const std::string& line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("malformed trace line: " + line);
  }
  return v;
}
}  // namespace

EventTrace EventTrace::read(std::istream& in) {
  EventTrace t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string type, time, value;
    if (!std::getline(ls, type, '\t') || !std::getline(ls, time, '\t') || !std::getline(ls, value)) {
      throw std::runtime_error("malformed trace line: " + line);
    }
    TraceRecord r{};
    if (type == "arrival") r.type = TraceEventType::Arrival;
    else if (type == "drop") r.type = TraceEventType::Drop;
    else if (type == "departure") r.type = TraceEventType::Departure;
    else if (type == "decision") r.type = TraceEventType::Decision;
    else throw std::runtime_error("unknown trace event: " + type);
    r.time = parse_field(time, line);
    r.value = value == "nan" ? std::numeric_limits<double>::quiet_NaN() : parse_field(value, line);
    t.records.push_back(r);
  }
  return t;
}

}  // namespace aud
