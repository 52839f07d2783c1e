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
#include <vector>

#include "vclic/common.hpp"

namespace vclic
{

  enum class EventKind : uint8_t
  {
    LineAssert,
    MsiEnqueue,
    MsiArrive,
    Selection,
    TrapEnter,
    IsrFirstInsn,
    TailChain,
    IsrExit,
    VmSwitchBegin,
    VmSwitchEnd,
    AccessFault,
  };

  const char* eventKindName(EventKind k);

  /// One timestamped simulation event. id/vsid/aux are -1 when not
  /// meaningful; priv is the privilege rank (0 VS, 1 HS, 2 M) or -1.
  /// aux carries the event-specific extra: the measured latency for
  /// IsrFirstInsn, the coalesced flag for LineAssert, the target VSID for
  /// VmSwitchBegin/End, the level for Selection.
  struct TraceEvent
  {
    Cycle cycle = 0;
    EventKind kind = EventKind::LineAssert;
    int64_t id = -1;
    int64_t vsid = -1;
    int8_t priv = -1;
    int64_t aux = -1;
  };

  /// Aggregate latency figures for one stimulus line (or for every sample
  /// of a run when line is -1).
  struct LatencyStats
  {
    int64_t line = -1;
    uint64_t count = 0;
    uint64_t minCycles = 0;
    uint64_t maxCycles = 0;
    double mean = 0;
    double stddev = 0;       // population
    uint64_t jitter = 0;     // max - min

    static LatencyStats from(int64_t line, const std::vector<uint64_t>& samples);
  };

  struct RunResult
  {
    std::vector<LatencyStats> perLine;   // sorted by line
    LatencyStats overall;                // line == -1
    std::vector<TraceEvent> trace;
  };

  // Byte-stable exports: stable field order, fixed formatting, one
  // newline-terminated row per record.
  std::string statsToCsv(const RunResult& r);
  std::string statsToJsonl(const RunResult& r);
  std::string traceToCsv(const std::vector<TraceEvent>& trace);
  std::string traceToJsonl(const std::vector<TraceEvent>& trace);

  /// Write content to path; failures raise std::runtime_error naming the
  /// path.
  void writeFile(const std::string& path, const std::string& content);

}
