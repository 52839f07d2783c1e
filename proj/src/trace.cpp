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

#include "vclic/trace.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace vclic
{

  const char* eventKindName(EventKind k)
  {
    switch (k)
      {
      case EventKind::LineAssert:    return "line_assert";
      case EventKind::MsiEnqueue:    return "msi_enqueue";
      case EventKind::MsiArrive:     return "msi_arrive";
      case EventKind::Selection:     return "selection";
      case EventKind::TrapEnter:     return "trap_enter";
      case EventKind::IsrFirstInsn:  return "isr_first_insn";
      case EventKind::TailChain:     return "tail_chain";
      case EventKind::IsrExit:       return "isr_exit";
      case EventKind::VmSwitchBegin: return "vm_switch_begin";
      case EventKind::VmSwitchEnd:   return "vm_switch_end";
      case EventKind::AccessFault:   return "access_fault";
      }
    return "?";
  }

  LatencyStats LatencyStats::from(int64_t line, const std::vector<uint64_t>& samples)
  {
    LatencyStats s;
    s.line = line;
    s.count = samples.size();
    if (samples.empty())
      return s;
    s.minCycles = samples.front();
    s.maxCycles = samples.front();
    double sum = 0;
    for (uint64_t v : samples)
      {
        s.minCycles = std::min(s.minCycles, v);
        s.maxCycles = std::max(s.maxCycles, v);
        sum += double(v);
      }
    s.mean = sum / double(samples.size());
    double var = 0;
    for (uint64_t v : samples)
      {
        double d = double(v) - s.mean;
        var += d * d;
      }
    s.stddev = std::sqrt(var / double(samples.size()));
    s.jitter = s.maxCycles - s.minCycles;
    return s;
  }

  namespace
  {
    std::string fmt(const char* f, double v)
    {
      char buf[64];
      std::snprintf(buf, sizeof(buf), f, v);
      return buf;
    }

    const char* privText(int8_t p)
    {
      switch (p)
        {
        case 0: return "VS";
        case 1: return "HS";
        case 2: return "M";
        default: return "";
        }
    }

    void statsRow(std::string& out, const LatencyStats& s)
    {
      out += s.line < 0 ? "all" : std::to_string(s.line);
      out += ',' + std::to_string(s.count);
      out += ',' + std::to_string(s.minCycles);
      out += ',' + std::to_string(s.maxCycles);
      out += ',' + fmt("%.6f", s.mean);
      out += ',' + fmt("%.6f", s.stddev);
      out += ',' + std::to_string(s.jitter);
      out += '\n';
    }
  }

  std::string statsToCsv(const RunResult& r)
  {
    std::string out = "line,count,min,max,mean,stddev,jitter\n";
    for (const LatencyStats& s : r.perLine)
      statsRow(out, s);
    statsRow(out, r.overall);
    return out;
  }

  std::string statsToJsonl(const RunResult& r)
  {
    std::string out;
    auto row = [&](const LatencyStats& s) {
      out += "{\"line\":" + std::to_string(s.line)
        + ",\"count\":" + std::to_string(s.count)
        + ",\"min\":" + std::to_string(s.minCycles)
        + ",\"max\":" + std::to_string(s.maxCycles)
        + ",\"mean\":" + fmt("%.6f", s.mean)
        + ",\"stddev\":" + fmt("%.6f", s.stddev)
        + ",\"jitter\":" + std::to_string(s.jitter) + "}\n";
    };
    for (const LatencyStats& s : r.perLine)
      row(s);
    row(r.overall);
    return out;
  }

  std::string traceToCsv(const std::vector<TraceEvent>& trace)
  {
    std::string out = "cycle,kind,id,vsid,priv,aux\n";
    for (const TraceEvent& e : trace)
      {
        out += std::to_string(e.cycle);
        out += ',';
        out += eventKindName(e.kind);
        out += ',' + (e.id < 0 ? std::string() : std::to_string(e.id));
        out += ',' + (e.vsid < 0 ? std::string() : std::to_string(e.vsid));
        out += ',';
        out += privText(e.priv);
        out += ',' + (e.aux < 0 ? std::string() : std::to_string(e.aux));
        out += '\n';
      }
    return out;
  }

  std::string traceToJsonl(const std::vector<TraceEvent>& trace)
  {
    std::string out;
    for (const TraceEvent& e : trace)
      {
        out += "{\"cycle\":" + std::to_string(e.cycle)
          + ",\"kind\":\"" + eventKindName(e.kind) + '"';
        if (e.id >= 0)
          out += ",\"id\":" + std::to_string(e.id);
        if (e.vsid >= 0)
          out += ",\"vsid\":" + std::to_string(e.vsid);
        if (e.priv >= 0)
          out += std::string(",\"priv\":\"") + privText(e.priv) + '"';
        if (e.aux >= 0)
          out += ",\"aux\":" + std::to_string(e.aux);
        out += "}\n";
      }
    return out;
  }

  void writeFile(const std::string& path, const std::string& content)
  {
    std::ofstream f(path, std::ios::binary);
    if (not f)
      throw std::runtime_error("cannot open for writing: " + path);
    f.write(content.data(), std::streamsize(content.size()));
    if (not f)
      throw std::runtime_error("write failed: " + path);
  }

}
