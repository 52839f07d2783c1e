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
#include <string>
#include <vector>

#include <json.hpp>

#include "vclic/costs.hpp"
#include "vclic/delivery.hpp"
#include "vclic/regs.hpp"

namespace vclic
{

  /// One stimulus source: fires `count * iterations` times with `period`
  /// spacing from `start`, or at the explicit `at` cycles (then iterations
  /// must be 1).
  struct StimulusEntry
  {
    uint32_t line = 0;
    Cycle start = 0;
    Cycle period = 0;
    uint32_t count = 1;
    std::vector<Cycle> at;
    uint8_t level = 255;
    uint8_t priority = 0;
    bool shv = false;
    Trigger trigger = Trigger::EdgeRising;
  };

  struct VmConfig
  {
    uint8_t vsid = 0;
    uint8_t prio = 0;
    std::vector<uint32_t> delegatedLines;
    uint32_t delegatedIrqCount = 0;   // >= delegatedLines.size(); extras
                                      // are auto-assigned by the engine
    double isrBodyCycles = -1;        // negative: profile default
    std::string workload = "idle";
  };

  /// A full experiment description. Loadable from JSON with strict key
  /// checking: unknown keys are a ValidationError naming the path.
  struct Scenario
  {
    std::string name = "scenario";
    IcKind ic = IcKind::Vclic;
    VirtMode mode = VirtMode::BareMetal;
    double clockMhz = 50.0;
    ClicConfig clic;
    std::string profileName{kDefaultProfile};
    CostProfile costs;
    MicroArchState uarch;
    MsiBus::Params bus;
    std::vector<VmConfig> vms;
    std::vector<StimulusEntry> stimulus;
    uint32_t iterations = 100;
    uint64_t seed = 1;
    Cycle timesliceCycles = 0;        // dynamic hypervisor round-robin; 0 = off
    uint8_t mintthresh = 0;
    uint8_t sintthresh = 0;
    uint8_t vsintthresh = 0;
    double isrBodyCycles = -1;        // bare-metal handler body; negative:
                                      // profile default

    void validate() const;            // ValidationError with field path

    HypervisorModel hypervisor() const;

    const VmConfig* vmOwningLine(uint32_t line) const;

    static Scenario fromJson(const nlohmann::json& doc);
    static Scenario fromFile(const std::string& path);
  };

  /// Resolve a profile by name: built-ins first, then
  /// $VCLIC_SIM_PROFILE_DIR/<name>.json.
  CostProfile resolveProfile(const std::string& name);

  /// Parse a cost-profile JSON object (optionally based on a named
  /// profile via its "profile" key).
  CostProfile costsFromJson(const nlohmann::json& j, const std::string& path);

  /// Set a dotted parameter path ("bus.traffic_rate", "vms.0.prio",
  /// "vms.*.delegated_irq_count") inside a raw scenario document.
  /// ValidationError when the path does not resolve.
  void setScenarioParam(nlohmann::json& doc, const std::string& path,
                        const nlohmann::json& value);

}
