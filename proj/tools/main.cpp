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

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vclic/harness.hpp"
#include "vclic/trace.hpp"

using namespace vclic;
using nlohmann::json;

namespace
{

  json loadDoc(const std::string& path)
  {
    std::ifstream f(path);
    if (not f)
      throw ValidationError("cannot open " + path);
    try
      {
        return json::parse(f);
      }
    catch (const json::exception& e)
      {
        throw ValidationError(path + ": " + e.what());
      }
  }

  void printStats(const RunResult& r, double clockMhz)
  {
    std::printf("%-8s %8s %10s %10s %12s %10s %10s %12s\n",
                "line", "count", "min", "max", "mean", "stddev", "jitter",
                "mean(ns)");
    auto row = [&](const LatencyStats& s) {
      double ns = s.mean / clockMhz * 1000.0;
      std::printf("%-8s %8llu %10llu %10llu %12.2f %10.2f %10llu %12.1f\n",
                  s.line < 0 ? "all" : std::to_string(s.line).c_str(),
                  (unsigned long long)s.count,
                  (unsigned long long)s.minCycles,
                  (unsigned long long)s.maxCycles,
                  s.mean, s.stddev,
                  (unsigned long long)s.jitter, ns);
    };
    for (const LatencyStats& s : r.perLine)
      row(s);
    row(r.overall);
  }

  std::vector<json> parseValueList(const std::string& csv)
  {
    std::vector<json> values;
    size_t pos = 0;
    while (pos <= csv.size())
      {
        size_t comma = csv.find(',', pos);
        std::string tok = comma == std::string::npos
          ? csv.substr(pos) : csv.substr(pos, comma - pos);
        if (not tok.empty())
          {
            try
              {
                values.push_back(json::parse(tok));
              }
            catch (const json::exception&)
              {
                values.push_back(json(tok));   // bare string value
              }
          }
        if (comma == std::string::npos)
          break;
        pos = comma + 1;
      }
    return values;
  }

}

int main(int argc, char** argv)
{
  CLI::App app{"vclic-sim: cycle-level interrupt-subsystem latency simulator"};
  app.require_subcommand(1);

  std::string scenarioPath, tracePath, csvPath, baseline, param, valueCsv;
  std::string traceFormat = "csv";
  std::string statsFormat = "csv";
  std::vector<std::string> comparePaths;

  CLI::App* run = app.add_subcommand("run", "run one scenario");
  run->add_option("scenario", scenarioPath, "scenario file")->required();
  run->add_option("--trace", tracePath, "write the event trace");
  run->add_option("--csv", csvPath, "write per-line latency stats");
  run->add_option("--trace-format", traceFormat, "csv|jsonl")
    ->check(CLI::IsMember({"csv", "jsonl"}));
  run->add_option("--stats-format", statsFormat, "csv|jsonl")
    ->check(CLI::IsMember({"csv", "jsonl"}));

  CLI::App* cmp = app.add_subcommand("compare", "run several scenarios and tabulate ratios");
  cmp->add_option("scenarios", comparePaths, "scenario files")->required();
  cmp->add_option("--baseline", baseline, "baseline scenario name")->required();
  cmp->add_option("--csv", csvPath, "write the comparison table");

  CLI::App* swp = app.add_subcommand("sweep", "sweep one scenario parameter");
  swp->add_option("scenario", scenarioPath, "scenario file")->required();
  swp->add_option("--param", param, "dotted parameter path")->required();
  swp->add_option("--values", valueCsv, "comma-separated values")->required();
  swp->add_option("--csv", csvPath, "write sweep rows");

  CLI::App* val = app.add_subcommand("validate", "validate a scenario file");
  val->add_option("scenario", scenarioPath, "scenario file")->required();

  CLI11_PARSE(app, argc, argv);

  try
    {
      if (run->parsed())
        {
          Scenario s = Scenario::fromFile(scenarioPath);
          Engine engine(s);
          RunResult r;
          try
            {
              r = engine.run();
            }
          catch (const ProtocolError& e)
            {
              // Abort with the tail of the trace as a diagnostic.
              std::cerr << "protocol error: " << e.what() << "\n";
              auto t = engine.partialTrace();
              size_t from = t.size() > 12 ? t.size() - 12 : 0;
              std::cerr << "trace suffix:\n"
                        << traceToCsv({t.begin() + std::ptrdiff_t(from), t.end()});
              return 2;
            }
          printStats(r, s.clockMhz);
          if (not csvPath.empty())
            writeFile(csvPath, statsFormat == "csv"
                      ? statsToCsv(r) : statsToJsonl(r));
          if (not tracePath.empty())
            writeFile(tracePath, traceFormat == "csv"
                      ? traceToCsv(r.trace) : traceToJsonl(r.trace));
        }
      else if (cmp->parsed())
        {
          std::vector<Scenario> scenarios;
          for (const std::string& p : comparePaths)
            scenarios.push_back(Scenario::fromFile(p));
          auto rows = compareScenarios(scenarios, baseline);
          std::fputs(compareTable(rows).c_str(), stdout);
          if (not csvPath.empty())
            writeFile(csvPath, compareCsv(rows));
        }
      else if (swp->parsed())
        {
          json doc = loadDoc(scenarioPath);
          auto rows = sweepScenario(doc, param, parseValueList(valueCsv));
          std::string csv = sweepCsv(param, rows);
          std::fputs(csv.c_str(), stdout);
          if (not csvPath.empty())
            writeFile(csvPath, csv);
        }
      else if (val->parsed())
        {
          Scenario s = Scenario::fromFile(scenarioPath);
          std::printf("ok: %s (ic=%s mode=%s lines=%u stimulus=%zu)\n",
                      s.name.c_str(), icKindName(s.ic), virtModeName(s.mode),
                      s.clic.nIrqs, s.stimulus.size());
        }
    }
  catch (const ValidationError& e)
    {
      std::cerr << "validation error: " << e.what() << "\n";
      return 1;
    }
  catch (const std::exception& e)
    {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  return 0;
}
