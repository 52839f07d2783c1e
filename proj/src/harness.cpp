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

#include "vclic/harness.hpp"

#include <cstdio>
#include <future>

namespace vclic
{

  namespace
  {
    std::string fmt(const char* f, double v)
    {
      char buf[64];
      std::snprintf(buf, sizeof(buf), f, v);
      return buf;
    }

    // Fan scenario runs out to workers; results come back in input order,
    // so aggregation is deterministic.
    std::vector<RunResult> runAll(const std::vector<Scenario>& scenarios)
    {
      std::vector<std::future<RunResult>> futs;
      futs.reserve(scenarios.size());
      for (const Scenario& s : scenarios)
        futs.push_back(std::async(std::launch::async,
                                  [&s] { return runScenario(s); }));
      std::vector<RunResult> results;
      results.reserve(futs.size());
      for (auto& f : futs)
        results.push_back(f.get());
      return results;
    }
  }

  std::vector<CompareRow> compareScenarios(const std::vector<Scenario>& scenarios,
                                           const std::string& baselineName)
  {
    if (scenarios.size() < 2)
      throw ValidationError("compare: need at least two scenarios");
    int baseIx = -1;
    for (size_t i = 0; i < scenarios.size(); ++i)
      if (scenarios[i].name == baselineName)
        baseIx = int(i);
    if (baseIx < 0)
      throw ValidationError("compare: baseline '" + baselineName + "' not among scenarios");

    std::vector<RunResult> results = runAll(scenarios);
    double baseMean = results[size_t(baseIx)].overall.mean;

    std::vector<CompareRow> rows;
    for (size_t i = 0; i < scenarios.size(); ++i)
      {
        CompareRow row;
        row.name = scenarios[i].name;
        row.overall = results[i].overall;
        row.ratioMean = baseMean > 0 ? results[i].overall.mean / baseMean : 0;
        rows.push_back(row);
      }
    return rows;
  }

  std::string compareTable(const std::vector<CompareRow>& rows)
  {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-28s %8s %10s %10s %12s %10s %10s\n",
                  "scenario", "count", "min", "max", "mean", "jitter", "ratio");
    out += buf;
    for (const CompareRow& r : rows)
      {
        std::snprintf(buf, sizeof(buf),
                      "%-28s %8llu %10llu %10llu %12.2f %10llu %10.4f\n",
                      r.name.c_str(),
                      (unsigned long long)r.overall.count,
                      (unsigned long long)r.overall.minCycles,
                      (unsigned long long)r.overall.maxCycles,
                      r.overall.mean,
                      (unsigned long long)r.overall.jitter,
                      r.ratioMean);
        out += buf;
      }
    return out;
  }

  std::string compareCsv(const std::vector<CompareRow>& rows)
  {
    std::string out = "scenario,count,min,max,mean,stddev,jitter,ratio_mean\n";
    for (const CompareRow& r : rows)
      {
        out += r.name;
        out += ',' + std::to_string(r.overall.count);
        out += ',' + std::to_string(r.overall.minCycles);
        out += ',' + std::to_string(r.overall.maxCycles);
        out += ',' + fmt("%.6f", r.overall.mean);
        out += ',' + fmt("%.6f", r.overall.stddev);
        out += ',' + std::to_string(r.overall.jitter);
        out += ',' + fmt("%.6f", r.ratioMean);
        out += '\n';
      }
    return out;
  }

  std::vector<SweepRow> sweepScenario(const nlohmann::json& baseDoc,
                                      const std::string& paramPath,
                                      const std::vector<nlohmann::json>& values)
  {
    if (values.empty())
      throw ValidationError("sweep: empty value list");

    std::vector<Scenario> scenarios;
    std::vector<std::string> labels;
    for (const nlohmann::json& v : values)
      {
        nlohmann::json doc = baseDoc;
        setScenarioParam(doc, paramPath, v);
        scenarios.push_back(Scenario::fromJson(doc));
        labels.push_back(v.dump());
      }

    std::vector<RunResult> results = runAll(scenarios);
    std::vector<SweepRow> rows;
    for (size_t i = 0; i < results.size(); ++i)
      {
        SweepRow row;
        row.value = labels[i];
        row.perLine = results[i].perLine;
        row.overall = results[i].overall;
        rows.push_back(row);
      }
    return rows;
  }

  std::string sweepCsv(const std::string& paramPath,
                       const std::vector<SweepRow>& rows)
  {
    std::string out = "param,value,line,count,min,max,mean,stddev,jitter\n";
    auto emit = [&](const SweepRow& row, const LatencyStats& s) {
      out += paramPath;
      out += ',' + row.value;
      out += ',' + (s.line < 0 ? std::string("all") : std::to_string(s.line));
      out += ',' + std::to_string(s.count);
      out += ',' + std::to_string(s.minCycles);
      out += ',' + std::to_string(s.maxCycles);
      out += ',' + fmt("%.6f", s.mean);
      out += ',' + fmt("%.6f", s.stddev);
      out += ',' + std::to_string(s.jitter);
      out += '\n';
    };
    for (const SweepRow& row : rows)
      {
        for (const LatencyStats& s : row.perLine)
          emit(row, s);
        emit(row, row.overall);
      }
    return out;
  }

}
