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

#include "vclic/costs.hpp"

#include <algorithm>

namespace vclic
{

  const char* icKindName(IcKind k)
  {
    switch (k)
      {
      case IcKind::Plic:  return "plic";
      case IcKind::Clic:  return "clic";
      case IcKind::Aia:   return "aia";
      case IcKind::Vclic: return "vclic";
      }
    return "?";
  }

  const char* virtModeName(VirtMode m)
  {
    switch (m)
      {
      case VirtMode::BareMetal: return "bare_metal";
      case VirtMode::StaticHv:  return "static_hv";
      case VirtMode::DynamicHv: return "dynamic_hv";
      }
    return "?";
  }

  void CostProfile::validate() const
  {
    const double* costs[] = {
      &hwTakeCost, &contextSaveCost, &contextRestoreCost, &swDecodeCost,
      &vectorFetchCost, &tailChainCost, &mmioCost, &hvTrapEntryCost,
      &hvEmulationCostPerAccess, &vmSwitchBaseCost, &irqCtxFixedCost,
      &irqCtxPerLineCost, &isrBodyCycles,
    };
    for (const double* c : costs)
      if (*c < 0)
        throw ValidationError("costs: cycle costs must be >= 0");
    if (coldCacheSwMultiplier < 1 or coldTlbTotalMultiplier < 1)
      throw ValidationError("costs: jitter multipliers must be >= 1");
  }

  bool haveBuiltinProfile(std::string_view name)
  { return name == kDefaultProfile; }

  CostProfile builtinProfile(std::string_view name)
  {
    if (name == kDefaultProfile)
      return CostProfile{};
    throw ValidationError("costs: unknown profile '" + std::string(name) + "'");
  }

  std::vector<std::string> builtinProfileNames()
  { return {std::string(kDefaultProfile)}; }

  unsigned emulatedAccessCount(IcKind kind)
  {
    switch (kind)
      {
      case IcKind::Plic: return 3;   // claim, complete, id read
      case IcKind::Clic: return 2;
      default:           return 0;
      }
  }

  double emulationLatency(IcKind kind, const CostProfile& costs)
  {
    unsigned k = emulatedAccessCount(kind);
    if (k == 0)
      return 0;   // direct injection, the hypervisor never runs
    return costs.hvTrapEntryCost + double(k) * costs.hvEmulationCostPerAccess;
  }

  const HypervisorModel::VmEntry& HypervisorModel::vm(uint8_t vsid) const
  {
    for (const VmEntry& e : vms)
      if (e.vsid == vsid)
        return e;
    throw ValidationError("vms: no VM with vsid " + std::to_string(vsid));
  }

  double vmContextSwitchCost(uint8_t fromVsid, uint8_t toVsid,
                             const HypervisorModel& hv, const CostProfile& costs)
  {
    if (hv.kind != HypervisorModel::Kind::Dynamic)
      throw ValidationError("mode: vm context switch on a static-partitioning hypervisor");
    double total = costs.vmSwitchBaseCost;
    if (not hv.vsprioEnabled)
      {
        double combined =
          (double(hv.vm(fromVsid).delegatedIrqCount)
           + double(hv.vm(toVsid).delegatedIrqCount)) / 2.0;
        if (combined > 0)
          total += costs.irqCtxFixedCost
            + costs.irqCtxPerLineCost * (std::max(combined, 1.0) - 1.0);
      }
    return total;
  }

  JitterAdjusted applyJitter(double swCycles, double totalCycles,
                             const MicroArchState& uarch, const CostProfile& costs)
  {
    JitterAdjusted adj;
    adj.sw = swCycles;
    if (uarch.icache == WarmCold::Cold or uarch.dcache == WarmCold::Cold)
      adj.sw *= costs.coldCacheSwMultiplier;
    adj.total = totalCycles - swCycles + adj.sw;
    if (uarch.tlb == WarmCold::Cold)
      {
        adj.total *= costs.coldTlbTotalMultiplier;
        adj.sw *= costs.coldTlbTotalMultiplier;
      }
    return adj;
  }

  ScheduleAction scheduleDecision(const HypervisorModel& hv, uint8_t runningVsid,
                                  bool haveForeign, uint8_t pendingForeignVsid)
  {
    if (hv.kind != HypervisorModel::Kind::Dynamic)
      throw ValidationError("mode: schedule on a static-partitioning hypervisor");
    if (haveForeign
        and hv.vm(pendingForeignVsid).prio > hv.vm(runningVsid).prio)
      return {ScheduleAction::Kind::SwitchTo, pendingForeignVsid};
    return {ScheduleAction::Kind::Stay, runningVsid};
  }

}
