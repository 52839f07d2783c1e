// Copyright 2026 the vclic-sim authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "vclic/delivery.hpp"

using namespace vclic;

TEST_CASE("wired delivery is a constant function")
{
  WiredFabric w;
  CHECK(w.deliver(100) == 101);
  w.propagationCycles = 3;
  for (Cycle t : {0ull, 7ull, 1000ull, 123456789ull})
    CHECK(w.deliver(t) == t + 3);
}

TEST_CASE("wired delivery is independent of bus state")
{
  WiredFabric w;
  MsiBus bus({5, 0.9, 8, 42});
  SplitMix64 rng(1);
  for (int i = 0; i < 1000; ++i)
    {
      Cycle t = bus.now() + rng.nextBelow(50);
      bus.deliver(0, t);          // churn the bus
      CHECK(w.deliver(t) == t + 1);
    }
}

TEST_CASE("msi: uncontended deliveries take exactly the base write time")
{
  MsiBus bus({14, 0.0, 8, 7});
  Cycle t = 0;
  for (int i = 0; i < 1000; ++i)
    {
      CHECK(bus.deliver(0, t) == t + 14);
      t += 37;
    }
}

TEST_CASE("msi: identical seeds give identical trajectories")
{
  MsiBus a({5, 0.4, 4, 1234});
  MsiBus b({5, 0.4, 4, 1234});
  for (Cycle t = 0; t < 5000; t += 9)
    CHECK(a.deliver(0, t) == b.deliver(0, t));
}

TEST_CASE("msi: a step injects at most burstiness slots")
{
  MsiBus bus({5, 1.0, 4, 99});
  uint64_t prev = bus.backlog();
  for (int i = 0; i < 10000; ++i)
    {
      bus.step();
      uint64_t cur = bus.backlog();
      // One slot drains, at most burstiness arrive.
      CHECK(cur <= prev - (prev > 0 ? 1 : 0) + 4);
      prev = cur;
    }
}

TEST_CASE("msi: zero traffic keeps the queue empty")
{
  MsiBus bus({5, 0.0, 4, 3});
  for (int i = 0; i < 3; ++i)
    bus.step();
  CHECK(bus.backlog() == 0);
}

TEST_CASE("msi: delivery in the past is a protocol error")
{
  MsiBus bus({5, 0.0, 1, 1});
  bus.stepTo(100);
  CHECK_THROWS_AS(bus.deliver(0, 50), ProtocolError);
}

namespace
{
  double meanLatency(double rate, uint64_t seed, int n, Cycle period,
                     uint32_t base = 5, uint32_t burst = 8)
  {
    MsiBus bus({base, rate, burst, seed});
    double sum = 0;
    Cycle t = 0;
    for (int i = 0; i < n; ++i)
      {
        sum += double(bus.deliver(0, t) - t);
        t += period;
      }
    return sum / n;
  }
}

TEST_CASE("msi: mean latency is monotone in traffic rate for a fixed seed")
{
  double prev = -1;
  for (double rate : {0.0, 0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 0.7, 0.9})
    {
      double m = meanLatency(rate, 777, 4000, 25);
      CHECK(m >= prev);
      prev = m;
    }
}

TEST_CASE("msi: heavy traffic reaches the multi-x regime, jitter grows")
{
  // rate 0.9 with bursts up to 8 is far past saturation: well over 3x the
  // uncontended latency over a 10000-delivery run.
  double uncontended = meanLatency(0.0, 5, 10000, 40);
  double heavy = meanLatency(0.9, 5, 10000, 40);
  CHECK(uncontended == 5.0);
  CHECK(heavy >= 3 * uncontended);

  // Jitter (max - min) grows with the traffic rate.
  auto jitterAt = [](double rate) {
    MsiBus bus({5, rate, 8, 21});
    uint64_t mn = ~0ull, mx = 0;
    Cycle t = 0;
    for (int i = 0; i < 4000; ++i)
      {
        uint64_t lat = bus.deliver(0, t) - t;
        mn = std::min(mn, lat);
        mx = std::max(mx, lat);
        t += 40;
      }
    return mx - mn;
  };
  uint64_t j0 = jitterAt(0.0);
  uint64_t j1 = jitterAt(0.1);
  uint64_t j2 = jitterAt(0.6);
  CHECK(j0 == 0);
  CHECK(j1 > j0);
  CHECK(j2 > j1);
}
