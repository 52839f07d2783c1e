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

#include "vclic/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <unordered_set>

namespace vclic
{

  using nlohmann::json;

  namespace
  {

    [[noreturn]] void fail(const std::string& path, const std::string& what)
    { throw ValidationError(path + ": " + what); }

    void checkKeys(const json& obj, const std::string& path,
                   std::initializer_list<const char*> allowed)
    {
      if (not obj.is_object())
        fail(path, "expected an object");
      for (auto it = obj.begin(); it != obj.end(); ++it)
        {
          bool known = false;
          for (const char* k : allowed)
            if (it.key() == k)
              {
                known = true;
                break;
              }
          if (not known)
            fail(path + "." + it.key(), "unknown key");
        }
    }

    template <typename T>
    T get(const json& obj, const char* key, T dflt, const std::string& path)
    {
      if (not obj.contains(key))
        return dflt;
      try
        {
          return obj.at(key).get<T>();
        }
      catch (const json::exception&)
        {
          fail(path + "." + key, "wrong type");
        }
    }

    uint64_t getUnsigned(const json& obj, const char* key, uint64_t dflt,
                         const std::string& path)
    {
      if (not obj.contains(key))
        return dflt;
      const json& v = obj.at(key);
      if (v.is_number_unsigned())
        return v.get<uint64_t>();
      if (v.is_number_integer() and v.get<int64_t>() >= 0)
        return uint64_t(v.get<int64_t>());
      fail(path + "." + key, "expected a non-negative integer");
    }

    IcKind parseIc(const std::string& s, const std::string& path)
    {
      if (s == "plic")  return IcKind::Plic;
      if (s == "clic")  return IcKind::Clic;
      if (s == "aia")   return IcKind::Aia;
      if (s == "vclic") return IcKind::Vclic;
      fail(path, "must be one of plic|clic|aia|vclic");
    }

    VirtMode parseMode(const std::string& s, const std::string& path)
    {
      if (s == "bare_metal") return VirtMode::BareMetal;
      if (s == "static_hv")  return VirtMode::StaticHv;
      if (s == "dynamic_hv") return VirtMode::DynamicHv;
      fail(path, "must be one of bare_metal|static_hv|dynamic_hv");
    }

    WarmCold parseWarmCold(const std::string& s, const std::string& path)
    {
      if (s == "warm") return WarmCold::Warm;
      if (s == "cold") return WarmCold::Cold;
      fail(path, "must be warm|cold");
    }

    Trigger parseTrigger(const std::string& s, const std::string& path)
    {
      if (s == "level") return Trigger::LevelHigh;
      if (s == "edge")  return Trigger::EdgeRising;
      fail(path, "must be level|edge");
    }

    ClicConfig clicFromJson(const json& j, const std::string& path)
    {
      checkKeys(j, path, {"n_irqs", "ctl_bits", "nlbits", "vsid_bits",
                          "vsprio_bits", "region_stride_bytes"});
      ClicConfig cfg;
      cfg.nIrqs = unsigned(getUnsigned(j, "n_irqs", cfg.nIrqs, path));
      cfg.ctlBits = unsigned(getUnsigned(j, "ctl_bits", cfg.ctlBits, path));
      cfg.nlbits = unsigned(getUnsigned(j, "nlbits", cfg.nlbits, path));
      cfg.vsidBits = unsigned(getUnsigned(j, "vsid_bits", cfg.vsidBits, path));
      cfg.vsprioBits = unsigned(getUnsigned(j, "vsprio_bits", cfg.vsprioBits, path));
      cfg.regionStrideBytes = getUnsigned(j, "region_stride_bytes",
                                          cfg.regionStrideBytes, path);
      return cfg;
    }

    MsiBus::Params busFromJson(const json& j, const std::string& path)
    {
      checkKeys(j, path, {"base_write_cycles", "traffic_rate", "burstiness", "seed"});
      MsiBus::Params p;
      p.baseWriteCycles = uint32_t(getUnsigned(j, "base_write_cycles",
                                               p.baseWriteCycles, path));
      p.trafficRate = get<double>(j, "traffic_rate", p.trafficRate, path);
      p.burstiness = uint32_t(getUnsigned(j, "burstiness", p.burstiness, path));
      p.seed = getUnsigned(j, "seed", p.seed, path);
      if (p.trafficRate < 0.0 or p.trafficRate > 1.0)
        fail(path + ".traffic_rate", "must be in [0, 1]");
      if (p.burstiness < 1)
        fail(path + ".burstiness", "must be >= 1");
      return p;
    }

    MicroArchState uarchFromJson(const json& j, const std::string& path)
    {
      checkKeys(j, path, {"icache", "dcache", "tlb"});
      MicroArchState u;
      u.icache = parseWarmCold(get<std::string>(j, "icache", "warm", path),
                               path + ".icache");
      u.dcache = parseWarmCold(get<std::string>(j, "dcache", "warm", path),
                               path + ".dcache");
      u.tlb = parseWarmCold(get<std::string>(j, "tlb", "warm", path),
                            path + ".tlb");
      return u;
    }

    VmConfig vmFromJson(const json& j, const std::string& path)
    {
      checkKeys(j, path, {"vsid", "prio", "delegated_lines",
                          "delegated_irq_count", "isr_body_cycles", "workload"});
      VmConfig vm;
      vm.vsid = uint8_t(getUnsigned(j, "vsid", 0, path));
      vm.prio = uint8_t(getUnsigned(j, "prio", 0, path));
      vm.delegatedLines =
        get<std::vector<uint32_t>>(j, "delegated_lines", {}, path);
      vm.delegatedIrqCount =
        uint32_t(getUnsigned(j, "delegated_irq_count",
                             uint64_t(vm.delegatedLines.size()), path));
      vm.isrBodyCycles = get<double>(j, "isr_body_cycles", -1.0, path);
      vm.workload = get<std::string>(j, "workload", "idle", path);
      return vm;
    }

    StimulusEntry stimFromJson(const json& j, const std::string& path)
    {
      checkKeys(j, path, {"line", "start", "period", "count", "at",
                          "level", "priority", "shv", "trigger"});
      StimulusEntry e;
      if (not j.contains("line"))
        fail(path + ".line", "required");
      e.line = uint32_t(getUnsigned(j, "line", 0, path));
      e.start = getUnsigned(j, "start", 0, path);
      e.period = getUnsigned(j, "period", 0, path);
      e.count = uint32_t(getUnsigned(j, "count", 1, path));
      e.at = get<std::vector<Cycle>>(j, "at", {}, path);
      e.level = uint8_t(getUnsigned(j, "level", 255, path));
      e.priority = uint8_t(getUnsigned(j, "priority", 0, path));
      e.shv = get<bool>(j, "shv", false, path);
      e.trigger = parseTrigger(get<std::string>(j, "trigger", "edge", path),
                               path + ".trigger");
      return e;
    }

  }

  CostProfile costsFromJson(const json& j, const std::string& path)
  {
    checkKeys(j, path,
              {"profile", "hw_take_cost", "context_save_cost",
               "context_restore_cost", "sw_decode_cost", "vector_fetch_cost",
               "tail_chain_cost", "mmio_cost", "hv_trap_entry_cost",
               "hv_emulation_cost_per_access", "vm_switch_base_cost",
               "irq_ctx_fixed_cost", "irq_ctx_per_line_cost",
               "cold_cache_sw_multiplier", "cold_tlb_total_multiplier",
               "isr_body_cycles"});
    CostProfile c = j.contains("profile")
      ? resolveProfile(get<std::string>(j, "profile", "", path))
      : CostProfile{};
    auto f = [&](const char* key, double& field) {
      field = get<double>(j, key, field, path);
    };
    f("hw_take_cost", c.hwTakeCost);
    f("context_save_cost", c.contextSaveCost);
    f("context_restore_cost", c.contextRestoreCost);
    f("sw_decode_cost", c.swDecodeCost);
    f("vector_fetch_cost", c.vectorFetchCost);
    f("tail_chain_cost", c.tailChainCost);
    f("mmio_cost", c.mmioCost);
    f("hv_trap_entry_cost", c.hvTrapEntryCost);
    f("hv_emulation_cost_per_access", c.hvEmulationCostPerAccess);
    f("vm_switch_base_cost", c.vmSwitchBaseCost);
    f("irq_ctx_fixed_cost", c.irqCtxFixedCost);
    f("irq_ctx_per_line_cost", c.irqCtxPerLineCost);
    f("cold_cache_sw_multiplier", c.coldCacheSwMultiplier);
    f("cold_tlb_total_multiplier", c.coldTlbTotalMultiplier);
    f("isr_body_cycles", c.isrBodyCycles);
    try
      {
        c.validate();
      }
    catch (const ValidationError& e)
      {
        fail(path, e.what());
      }
    return c;
  }

  CostProfile resolveProfile(const std::string& name)
  {
    if (haveBuiltinProfile(name))
      return builtinProfile(name);
    if (const char* dir = std::getenv("VCLIC_SIM_PROFILE_DIR"))
      {
        std::string path = std::string(dir) + "/" + name + ".json";
        std::ifstream f(path);
        if (f)
          {
            json doc;
            try
              {
                doc = json::parse(f);
              }
            catch (const json::exception& e)
              {
                throw ValidationError("costs: profile file " + path + ": "
                                      + e.what());
              }
            return costsFromJson(doc, "costs(" + name + ")");
          }
      }
    throw ValidationError("costs: unknown profile '" + name + "'");
  }

  Scenario Scenario::fromJson(const json& doc)
  {
    checkKeys(doc, "scenario",
              {"name", "ic", "mode", "clock_mhz", "clic", "costs", "uarch",
               "bus", "vms", "stimulus", "iterations", "seed",
               "timeslice_cycles", "csr", "isr_body_cycles"});
    Scenario s;
    s.name = get<std::string>(doc, "name", s.name, "scenario");
    s.ic = parseIc(get<std::string>(doc, "ic", "vclic", "scenario"), "scenario.ic");
    s.mode = parseMode(get<std::string>(doc, "mode", "bare_metal", "scenario"),
                       "scenario.mode");
    s.clockMhz = get<double>(doc, "clock_mhz", s.clockMhz, "scenario");
    if (doc.contains("clic"))
      s.clic = clicFromJson(doc.at("clic"), "scenario.clic");
    if (doc.contains("costs"))
      {
        const json& c = doc.at("costs");
        if (c.is_string())
          {
            s.profileName = c.get<std::string>();
            s.costs = resolveProfile(s.profileName);
          }
        else
          {
            s.profileName = get<std::string>(c, "profile", "custom",
                                             "scenario.costs");
            s.costs = costsFromJson(c, "scenario.costs");
          }
      }
    else
      s.costs = builtinProfile(kDefaultProfile);
    if (doc.contains("uarch"))
      s.uarch = uarchFromJson(doc.at("uarch"), "scenario.uarch");
    if (doc.contains("bus"))
      s.bus = busFromJson(doc.at("bus"), "scenario.bus");
    if (doc.contains("vms"))
      {
        const json& vs = doc.at("vms");
        if (not vs.is_array())
          fail("scenario.vms", "expected an array");
        for (size_t i = 0; i < vs.size(); ++i)
          s.vms.push_back(vmFromJson(vs[i], "scenario.vms[" + std::to_string(i) + "]"));
      }
    if (doc.contains("stimulus"))
      {
        const json& st = doc.at("stimulus");
        if (not st.is_array())
          fail("scenario.stimulus", "expected an array");
        for (size_t i = 0; i < st.size(); ++i)
          s.stimulus.push_back(stimFromJson(st[i],
                                            "scenario.stimulus[" + std::to_string(i) + "]"));
      }
    s.iterations = uint32_t(getUnsigned(doc, "iterations", s.iterations, "scenario"));
    s.seed = getUnsigned(doc, "seed", s.seed, "scenario");
    s.timesliceCycles = getUnsigned(doc, "timeslice_cycles", 0, "scenario");
    if (doc.contains("csr"))
      {
        const json& c = doc.at("csr");
        checkKeys(c, "scenario.csr", {"mintthresh", "sintthresh", "vsintthresh"});
        s.mintthresh = uint8_t(getUnsigned(c, "mintthresh", 0, "scenario.csr"));
        s.sintthresh = uint8_t(getUnsigned(c, "sintthresh", 0, "scenario.csr"));
        s.vsintthresh = uint8_t(getUnsigned(c, "vsintthresh", 0, "scenario.csr"));
      }
    s.isrBodyCycles = get<double>(doc, "isr_body_cycles", -1.0, "scenario");
    s.validate();
    return s;
  }

  Scenario Scenario::fromFile(const std::string& path)
  {
    std::ifstream f(path);
    if (not f)
      throw ValidationError("scenario file: cannot open " + path);
    json doc;
    try
      {
        doc = json::parse(f);
      }
    catch (const json::exception& e)
      {
        throw ValidationError("scenario file " + path + ": " + e.what());
      }
    return fromJson(doc);
  }

  void Scenario::validate() const
  {
    clic.validate();
    costs.validate();
    if (clockMhz <= 0)
      throw ValidationError("scenario.clock_mhz: must be positive");
    if (iterations < 1)
      throw ValidationError("scenario.iterations: must be >= 1");

    if (mode == VirtMode::BareMetal and not vms.empty())
      throw ValidationError("scenario.vms: bare_metal scenarios host no VMs");
    if (mode == VirtMode::StaticHv and vms.size() != 1)
      throw ValidationError("scenario.vms: static_hv pins exactly one VM");
    if (mode == VirtMode::DynamicHv and vms.empty())
      throw ValidationError("scenario.vms: dynamic_hv needs at least one VM");

    std::set<unsigned> vsids;
    std::set<uint32_t> delegated;
    for (size_t i = 0; i < vms.size(); ++i)
      {
        const VmConfig& vm = vms[i];
        std::string path = "scenario.vms[" + std::to_string(i) + "]";
        if (vm.vsid >= clic.numVsids())
          throw ValidationError(path + ".vsid: must be < 64");
        if (not vsids.insert(vm.vsid).second)
          throw ValidationError(path + ".vsid: duplicate");
        if (vm.delegatedIrqCount < vm.delegatedLines.size())
          throw ValidationError(path + ".delegated_irq_count: smaller than delegated_lines");
        // The count sizes the VM's multiplexed interrupt context; only the
        // explicitly wired lines occupy physical inputs concurrently.
        if (vm.delegatedIrqCount > clic.nIrqs)
          throw ValidationError(path + ".delegated_irq_count: exceeds n_irqs");
        for (uint32_t line : vm.delegatedLines)
          {
            if (line >= clic.nIrqs)
              throw ValidationError(path + ".delegated_lines: line out of range");
            if (not delegated.insert(line).second)
              throw ValidationError(path + ".delegated_lines: line delegated twice");
          }
      }

    bool explicitAt = false;
    for (size_t i = 0; i < stimulus.size(); ++i)
      {
        const StimulusEntry& e = stimulus[i];
        std::string path = "scenario.stimulus[" + std::to_string(i) + "]";
        if (e.line >= clic.nIrqs)
          throw ValidationError(path + ".line: must be < n_irqs");
        if (e.at.empty())
          {
            if (e.count >= 2 and e.period == 0)
              throw ValidationError(path + ".period: required when count > 1");
            if (e.count < 1)
              throw ValidationError(path + ".count: must be >= 1");
          }
        else
          {
            if (e.period != 0 or e.count != 1)
              throw ValidationError(path + ".at: exclusive with period/count");
            explicitAt = true;
          }
        if (mode != VirtMode::BareMetal and vms.size() > 0)
          {
            // In virtualized scenarios every stimulus line must belong to
            // a VM so the engine knows the logical target guest.
            if (vmOwningLine(e.line) == nullptr)
              throw ValidationError(path + ".line: not delegated to any VM");
          }
      }
    if (explicitAt and iterations != 1)
      throw ValidationError("scenario.iterations: must be 1 with explicit stimulus cycles");
  }

  const VmConfig* Scenario::vmOwningLine(uint32_t line) const
  {
    for (const VmConfig& vm : vms)
      for (uint32_t l : vm.delegatedLines)
        if (l == line)
          return &vm;
    return nullptr;
  }

  HypervisorModel Scenario::hypervisor() const
  {
    HypervisorModel hv;
    hv.kind = mode == VirtMode::DynamicHv ? HypervisorModel::Kind::Dynamic
      : HypervisorModel::Kind::Static;
    hv.vsprioEnabled = clic.vsprioBits > 0;
    for (const VmConfig& vm : vms)
      {
        HypervisorModel::VmEntry e;
        e.vsid = vm.vsid;
        e.prio = vm.prio;
        e.delegatedIrqCount = vm.delegatedIrqCount;
        e.isrBodyCycles = vm.isrBodyCycles;
        e.workload = vm.workload;
        hv.vms.push_back(e);
      }
    return hv;
  }

  void setScenarioParam(json& doc, const std::string& path, const json& value)
  {
    // Dotted path with array indices and the "*" wildcard for arrays.
    std::vector<std::string> parts;
    size_t pos = 0;
    while (pos <= path.size())
      {
        size_t dot = path.find('.', pos);
        if (dot == std::string::npos)
          {
            parts.push_back(path.substr(pos));
            break;
          }
        parts.push_back(path.substr(pos, dot - pos));
        pos = dot + 1;
      }
    if (parts.empty() or parts.front().empty())
      throw ValidationError("sweep: empty parameter path");

    struct Walker
    {
      const std::vector<std::string>& parts;
      const json& value;
      const std::string& path;

      void walk(json& node, size_t depth)
      {
        const std::string& key = parts[depth];
        bool last = depth + 1 == parts.size();
        if (key == "*")
          {
            if (not node.is_array())
              throw ValidationError("sweep: '*' applied to a non-array at " + path);
            for (json& el : node)
              {
                if (last)
                  el = value;
                else
                  walk(el, depth + 1);
              }
            return;
          }
        if (node.is_array())
          {
            size_t ix = 0;
            try
              {
                ix = std::stoul(key);
              }
            catch (...)
              {
                throw ValidationError("sweep: expected array index at '" + key
                                      + "' in " + path);
              }
            if (ix >= node.size())
              throw ValidationError("sweep: index out of range in " + path);
            if (last)
              node[ix] = value;
            else
              walk(node[ix], depth + 1);
            return;
          }
        if (not node.is_object())
          throw ValidationError("sweep: path descends into a scalar in " + path);
        if (last)
          {
            node[key] = value;   // may introduce the key (e.g. defaults)
            return;
          }
        if (not node.contains(key))
          node[key] = json::object();
        walk(node.at(key), depth + 1);
      }
    };

    Walker{parts, value, path}.walk(doc, 0);
  }

}
