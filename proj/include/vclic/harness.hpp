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

#include <string>
#include <vector>

#include <json.hpp>

#include "vclic/engine.hpp"
#include "vclic/scenario.hpp"

namespace vclic
{

  struct CompareRow
  {
    std::string name;
    LatencyStats overall;
    double ratioMean = 0;   // mean / baseline mean
  };

  /// Run every scenario (member runs may execute in parallel; each
  /// simulation instance stays on one worker) and tabulate overall stats
  /// with ratio columns against the named baseline. ValidationError when
  /// fewer than two scenarios are given or the baseline name is absent.
  std::vector<CompareRow> compareScenarios(const std::vector<Scenario>& scenarios,
                                           const std::string& baselineName);

  std::string compareTable(const std::vector<CompareRow>& rows);
  std::string compareCsv(const std::vector<CompareRow>& rows);

  struct SweepRow
  {
    std::string value;             // parameter value as JSON text
    std::vector<LatencyStats> perLine;
    LatencyStats overall;
  };

  /// One run per parameter value, applied to the raw scenario document at
  /// the dotted path, re-validated each time. ValidationError on an empty
  /// value list or a path that does not resolve.
  std::vector<SweepRow> sweepScenario(const nlohmann::json& baseDoc,
                                      const std::string& paramPath,
                                      const std::vector<nlohmann::json>& values);

  std::string sweepCsv(const std::string& paramPath,
                       const std::vector<SweepRow>& rows);

}
