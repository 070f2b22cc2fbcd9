#include <doctest.h>

#include <cmath>
#include <sstream>

#include "aud/simulator.hpp"

using namespace aud;

namespace {
SimRunConfig config(double lambda, ServiceModel service, DecisionModel decision,
                    Discipline disc = Discipline::Blocking1) {
  return {SystemSpec{ArrivalModel(lambda), std::move(service), decision, disc}, 1000, 0, 3};
}
}  // namespace

TEST_CASE("trace text round-trips exactly") {
  const auto t = trace(config(1.0, ServiceModel::uniform(1.0), DecisionModel::poisson(2.0)), 500);
  REQUIRE(t.records.size() == 500);
  std::stringstream ss;
  t.write(ss);
  const auto back = EventTrace::read(ss);
  REQUIRE(back.records.size() == t.records.size());
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    CHECK(back.records[i].type == t.records[i].type);
    CHECK(back.records[i].time == t.records[i].time);
    if (std::isnan(t.records[i].value)) CHECK(std::isnan(back.records[i].value));
    else CHECK(back.records[i].value == t.records[i].value);
  }
  std::istringstream bad("arrival\t1.0\n");
  CHECK_THROWS(EventTrace::read(bad));
}

TEST_CASE("trace semantics for the blocking queue") {
  const double mu = 1.0;
  const auto cfg = config(2.0, ServiceModel::exponential(mu), DecisionModel::poisson(3.0));
  const auto t = trace(cfg, 20000);

  // Service draws replayed from the service lane of substream 0.
  RngStream service = RngStream(cfg.seed, 0).lane(1);

  bool busy = false;
  bool departed = false;
  double gen = 0.0, last_gen = NAN, prev_time = 0.0;
  for (const auto& r : t.records) {
    CHECK(r.time >= prev_time);
    prev_time = r.time;
    switch (r.type) {
      case TraceEventType::Arrival:
        REQUIRE_FALSE(busy);
        busy = true;
        gen = r.time;
        break;
      case TraceEventType::Drop:
        CHECK(busy);
        break;
      case TraceEventType::Departure:
        REQUIRE(busy);
        busy = false;
        departed = true;
        CHECK(r.value == gen);
        CHECK(r.time - r.value == doctest::Approx(sample(cfg.spec.service, service)).epsilon(1e-12));
        last_gen = r.value;
        break;
      case TraceEventType::Decision:
        if (!departed) CHECK(std::isnan(r.value));
        else CHECK(r.value == r.time - last_gen);
        break;
    }
  }
}

TEST_CASE("decisions before the first departure carry no age") {
  const auto t = trace(config(0.01, ServiceModel::deterministic(0.01), DecisionModel::poisson(10.0)), 50);
  REQUIRE(t.records.front().type == TraceEventType::Decision);
  CHECK(std::isnan(t.records.front().value));
}

TEST_CASE("deterministic service under saturation sees exactly m0 decisions per service") {
  const int m0 = 4;
  const double mu = 1.0;
  const auto t = trace(config(1000.0, ServiceModel::deterministic(mu), DecisionModel::periodic(m0 * mu)), 400000);
  int in_service = 0;
  int intervals = 0;
  bool started = false;
  bool ok = true;
  for (const auto& r : t.records) {
    if (r.type == TraceEventType::Arrival) {
      started = true;
      in_service = 0;
    } else if (r.type == TraceEventType::Decision && started) {
      ++in_service;
    } else if (r.type == TraceEventType::Departure) {
      // decisions between the next arrival and this departure
      if (intervals > 0 && in_service != m0) ok = false;
      ++intervals;
    }
  }
  CHECK(intervals > 100);
  CHECK(ok);
}

TEST_CASE("periodic epochs follow the configured phase") {
  const auto t = trace(config(1.0, ServiceModel::exponential(1.0), DecisionModel::periodic(2.0, 0.125)), 400);
  int j = 0;
  for (const auto& r : t.records) {
    if (r.type != TraceEventType::Decision) continue;
    CHECK(r.time == 0.125 + j / 2.0);
    ++j;
  }
  CHECK(j > 50);
}

TEST_CASE("FCFS trace never drops and departs in order") {
  const auto t = trace(config(0.5, ServiceModel::exponential(1.0), DecisionModel::poisson(1.0),
                             Discipline::FcfsInfinite),
                       5000);
  double last_gen = -1.0;
  for (const auto& r : t.records) {
    CHECK(r.type != TraceEventType::Drop);
    if (r.type == TraceEventType::Departure) {
      CHECK(r.value > last_gen);
      last_gen = r.value;
    }
  }
  CHECK(trace(config(1.0, ServiceModel::exponential(1.0), DecisionModel::poisson(1.0)), 0).records.empty());
}
