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

#include <optional>
#include <vector>

#include "vclic/common.hpp"
#include "vclic/delivery.hpp"
#include "vclic/regs.hpp"

namespace vclic
{

  /// Platform-level interrupt controller with the claim/complete
  /// handshake. Source ids run 1..nSources; 0 means "none". A claimed
  /// source is excluded from gateway selection until completed; ties on
  /// priority go to the lowest id.
  class PlicModel
  {
  public:
    explicit PlicModel(uint32_t nSources);

    uint32_t numSources() const
    { return uint32_t(srcs_.size() - 1); }

    void setPriority(uint32_t id, uint32_t prio);
    void setEnabled(uint32_t id, bool en);
    void setTrigger(uint32_t id, Trigger t);
    void setThreshold(uint32_t t)
    { threshold_ = t; }

    /// Drive the source wire. Level gateways track it; edge gateways latch
    /// pending on a rising edge.
    void setSource(uint32_t id, bool asserted, Cycle now);

    /// Selection the gateway presents without claiming (0 if none).
    uint32_t peek() const;

    /// Claim the current selection: returns its id (0 if none), marks it
    /// in-service and clears pending.
    uint32_t claim(Cycle now);

    /// Finish servicing a claimed source; level sources re-pend when still
    /// asserted. ProtocolError if the id is not in service.
    void complete(uint32_t id);

    bool pending(uint32_t id) const;
    bool claimed(uint32_t id) const;
    Cycle lastAssertCycle(uint32_t id) const;

  private:
    struct Source
    {
      uint32_t priority = 0;
      bool enabled = false;
      bool pending = false;
      bool claimed = false;
      bool wire = false;
      Trigger trig = Trigger::LevelHigh;
      Cycle assertCycle = 0;
    };

    void checkId(uint32_t id) const;

    std::vector<Source> srcs_;   // index 0 reserved
    uint32_t threshold_ = 0;
  };

  /// Wired-input router of the MSI-based pair: converts a source
  /// activation into one MSI write on the shared bus, carrying the
  /// source's identity.
  class Aplic
  {
  public:
    explicit Aplic(uint32_t nSources);

    void setEnabled(uint32_t id, bool en);
    void setTrigger(uint32_t id, Trigger t);

    /// Drive the source wire; on an activation event of an enabled source,
    /// posts exactly one MSI and returns its bus arrival cycle.
    std::optional<Cycle> setSource(uint32_t id, bool asserted, Cycle now, MsiBus& bus);

  private:
    struct Source
    {
      bool enabled = false;
      bool wire = false;
      Trigger trig = Trigger::EdgeRising;
    };
    std::vector<Source> srcs_;
  };

  /// Per-hart incoming-MSI file: one pending and one enable bit per
  /// identity; the lowest pending-and-enabled identity is delivered first.
  class Imsic
  {
  public:
    explicit Imsic(uint32_t nIdentities);

    void setEnabled(uint32_t identity, bool en);

    /// MSI arrival: the identity becomes pending whether or not it is
    /// enabled; disabled identities are just not delivered.
    void deliver(uint32_t identity, Cycle arrivalCycle);

    /// Lowest pending-and-enabled identity, if any.
    std::optional<uint32_t> top() const;

    /// Claim (clear pending) the given identity; ProtocolError unless it
    /// is the current top.
    void claim(uint32_t identity);

    bool pending(uint32_t identity) const;
    Cycle lastArrivalCycle(uint32_t identity) const;

  private:
    std::vector<bool> pending_;
    std::vector<bool> enabled_;
    std::vector<Cycle> arrival_;
  };

  struct AiaModel
  {
    Aplic aplic;
    Imsic imsic;
    MsiBus bus;

    AiaModel(uint32_t nSources, const MsiBus::Params& busParams)
      : aplic(nSources), imsic(nSources), bus(busParams)
    { }
  };

  /// A vanilla (non-virtualized) controller is the same register file with
  /// every line's v bit clear and the per-VM priority bank absent.
  ClicConfig vanillaClicConfig(ClicConfig cfg);

}
