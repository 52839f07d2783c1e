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

#pragma once

#include "vclic/common.hpp"

namespace vclic
{

  /// Core-local wired delivery: a fixed propagation delay, independent of
  /// everything else in the simulation.
  struct WiredFabric
  {
    uint32_t propagationCycles = 1;

    Cycle deliver(Cycle assertCycle) const
    { return assertCycle + propagationCycles; }
  };

  /// Single shared write channel carrying MSIs plus seeded background
  /// traffic. Each cycle the channel drains one slot; with probability
  /// traffic_rate a background burst of 1..burstiness slots arrives. An
  /// MSI issued at cycle t waits out the background backlog, then takes
  /// base_write_cycles of its own. Fully deterministic for a given seed:
  /// the background draws are consumed every cycle whether or not traffic
  /// is injected, so runs at different rates share one arrival pattern.
  class MsiBus
  {
  public:
    struct Params
    {
      uint32_t baseWriteCycles = 14;
      double trafficRate = 0.0;      // arrival probability per cycle
      uint32_t burstiness = 1;       // max slots injected per arrival
      uint64_t seed = 1;
    };

    explicit MsiBus(const Params& p)
      : p_(p), rng_(p.seed)
    { }

    const Params& params() const
    { return p_; }

    /// Advance one cycle: drain a slot, then maybe inject a burst.
    void step()
    {
      if (backlog_ > 0)
        --backlog_;
      double u = rng_.nextUnit();
      uint64_t k = 1 + rng_.nextBelow(p_.burstiness ? p_.burstiness : 1);
      if (u < p_.trafficRate)
        backlog_ += k;
      ++now_;
    }

    void stepTo(Cycle cycle)
    {
      while (now_ < cycle)
        step();
    }

    /// Arrival cycle of an MSI posted at assertCycle: the write starts
    /// once the background backlog ahead of it drains.
    Cycle deliver(uint32_t /*id*/, Cycle assertCycle)
    {
      if (assertCycle < now_)
        throw ProtocolError("MsiBus::deliver: delivery in the past");
      stepTo(assertCycle);
      return assertCycle + backlog_ + p_.baseWriteCycles;
    }

    uint64_t backlog() const
    { return backlog_; }

    Cycle now() const
    { return now_; }

  private:
    Params p_;
    SplitMix64 rng_;
    Cycle now_ = 0;
    uint64_t backlog_ = 0;
  };

}
