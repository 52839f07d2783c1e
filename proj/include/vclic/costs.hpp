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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vclic/common.hpp"

namespace vclic
{

  enum class IcKind : uint8_t { Plic, Clic, Aia, Vclic };
  enum class VirtMode : uint8_t { BareMetal, StaticHv, DynamicHv };

  const char* icKindName(IcKind k);
  const char* virtModeName(VirtMode m);

  /// All software/bus cycle-cost knobs, in cycles unless noted. The
  /// "cheshire-50mhz" defaults are calibrated so that an emulated
  /// interrupt path lands at about 20x its direct path, a wired direct
  /// path at about 85% of the uncontended MSI path, and the VM-switch
  /// interrupt-context term spans 1250..10000 cycles over 1..64 delegated
  /// lines on top of the 35000-cycle base switch.
  struct CostProfile
  {
    double hwTakeCost = 2;
    double contextSaveCost = 60;
    double contextRestoreCost = 40;
    double swDecodeCost = 17;
    double vectorFetchCost = 4;
    double tailChainCost = 10;
    double mmioCost = 20;
    double hvTrapEntryCost = 760;
    double hvEmulationCostPerAccess = 380;
    double vmSwitchBaseCost = 35000;
    double irqCtxFixedCost = 1250;
    double irqCtxPerLineCost = 8750.0 / 63.0;
    double coldCacheSwMultiplier = 8.0;
    double coldTlbTotalMultiplier = 1.05;
    double isrBodyCycles = 80;

    void validate() const;   // all costs >= 0, multipliers >= 1
  };

  inline constexpr std::string_view kDefaultProfile = "cheshire-50mhz";

  bool haveBuiltinProfile(std::string_view name);
  CostProfile builtinProfile(std::string_view name);   // ValidationError if unknown
  std::vector<std::string> builtinProfileNames();

  enum class WarmCold : uint8_t { Warm, Cold };

  struct MicroArchState
  {
    WarmCold icache = WarmCold::Warm;
    WarmCold dcache = WarmCold::Warm;
    WarmCold tlb = WarmCold::Warm;
  };

  /// Number of hypervisor-emulated MMIO accesses on the interrupt path:
  /// 3 for the PLIC (claim, complete and the id read), 2 for the CLIC,
  /// 0 for controllers with direct injection.
  unsigned emulatedAccessCount(IcKind kind);

  /// Cycles the hypervisor adds to the virtualized interrupt path when the
  /// controller has no hardware virtualization: trap entry plus the
  /// per-access emulation cost. Zero for vclic and aia.
  double emulationLatency(IcKind kind, const CostProfile& costs);

  /// Hypervisor configuration for the scheduling cost model.
  struct HypervisorModel
  {
    enum class Kind : uint8_t { Static, Dynamic };

    struct VmEntry
    {
      uint8_t vsid = 0;
      uint8_t prio = 0;
      uint32_t delegatedIrqCount = 0;
      double isrBodyCycles = -1;   // negative: use the profile default
      std::string workload = "idle";
    };

    Kind kind = Kind::Static;
    bool vsprioEnabled = true;
    std::vector<VmEntry> vms;

    const VmEntry& vm(uint8_t vsid) const;   // ValidationError if absent
  };

  /// Cycles to switch the hart from one VM to another: the base switch
  /// plus, when VSPRIO is off, the interrupt-controller context term. That
  /// term is linear in the combined delegated-line count, normalized so
  /// equal per-VM counts n give irq_ctx_fixed + per_line * (n - 1).
  /// ValidationError for a static-partitioning hypervisor.
  double vmContextSwitchCost(uint8_t fromVsid, uint8_t toVsid,
                             const HypervisorModel& hv, const CostProfile& costs);

  struct JitterAdjusted
  {
    double sw = 0;
    double total = 0;
  };

  /// Scale a latency path for the micro-architectural state: cold caches
  /// multiply the software share only, then a cold TLB multiplies the
  /// resulting total. Warm/warm is the identity.
  JitterAdjusted applyJitter(double swCycles, double totalCycles,
                             const MicroArchState& uarch, const CostProfile& costs);

  /// Scheduler decision for the dynamic-partitioning hypervisor.
  struct ScheduleAction
  {
    enum class Kind : uint8_t { Stay, SwitchTo } kind = Kind::Stay;
    uint8_t targetVsid = 0;
  };

  /// Pure scheduling rule: a pending foreign-VM interrupt switches to its
  /// VM exactly when that VM's priority is strictly higher; otherwise stay
  /// (round-robin rotation happens at timeslice boundaries, driven by the
  /// engine). pendingForeignVsid is the target VM of the pending selection,
  /// if any. ValidationError when a static hypervisor is asked to decide.
  ScheduleAction scheduleDecision(const HypervisorModel& hv, uint8_t runningVsid,
                                  bool haveForeign, uint8_t pendingForeignVsid);

}
