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

#include "vclic/ic_alt.hpp"

namespace vclic
{

  PlicModel::PlicModel(uint32_t nSources)
    : srcs_(nSources + 1)
  { }

  void PlicModel::checkId(uint32_t id) const
  {
    if (id == 0 or id >= srcs_.size())
      throw ProtocolError("plic: source id out of range");
  }

  void PlicModel::setPriority(uint32_t id, uint32_t prio)
  {
    checkId(id);
    srcs_[id].priority = prio;
  }

  void PlicModel::setEnabled(uint32_t id, bool en)
  {
    checkId(id);
    srcs_[id].enabled = en;
  }

  void PlicModel::setTrigger(uint32_t id, Trigger t)
  {
    checkId(id);
    srcs_[id].trig = t;
  }

  void PlicModel::setSource(uint32_t id, bool asserted, Cycle now)
  {
    checkId(id);
    Source& s = srcs_[id];
    bool was = s.wire;
    s.wire = asserted;
    if (s.trig == Trigger::LevelHigh)
      {
        // The gateway holds off while the source is in service.
        if (not asserted)
          s.pending = false;
        else if (not s.claimed and not s.pending)
          {
            s.pending = true;
            s.assertCycle = now;
          }
      }
    else if (asserted and not was and not s.claimed)
      {
        if (not s.pending)
          s.assertCycle = now;
        s.pending = true;
      }
  }

  uint32_t PlicModel::peek() const
  {
    uint32_t bestId = 0;
    uint32_t bestPrio = 0;
    for (uint32_t id = 1; id < srcs_.size(); ++id)
      {
        const Source& s = srcs_[id];
        if (s.pending and s.enabled and not s.claimed
            and s.priority > threshold_ and s.priority > bestPrio)
          {
            bestPrio = s.priority;
            bestId = id;   // strict > keeps the lowest id on ties
          }
      }
    return bestId;
  }

  uint32_t PlicModel::claim(Cycle)
  {
    uint32_t id = peek();
    if (id != 0)
      {
        srcs_[id].claimed = true;
        srcs_[id].pending = false;
      }
    return id;
  }

  void PlicModel::complete(uint32_t id)
  {
    checkId(id);
    Source& s = srcs_[id];
    if (not s.claimed)
      throw ProtocolError("plic: complete of unclaimed source "
                          + std::to_string(id));
    s.claimed = false;
    if (s.trig == Trigger::LevelHigh and s.wire)
      s.pending = true;   // still asserted: back to pending
  }

  bool PlicModel::pending(uint32_t id) const
  {
    checkId(id);
    return srcs_[id].pending;
  }

  bool PlicModel::claimed(uint32_t id) const
  {
    checkId(id);
    return srcs_[id].claimed;
  }

  Cycle PlicModel::lastAssertCycle(uint32_t id) const
  {
    checkId(id);
    return srcs_[id].assertCycle;
  }

  Aplic::Aplic(uint32_t nSources)
    : srcs_(nSources)
  { }

  void Aplic::setEnabled(uint32_t id, bool en)
  { srcs_.at(id).enabled = en; }

  void Aplic::setTrigger(uint32_t id, Trigger t)
  { srcs_.at(id).trig = t; }

  std::optional<Cycle> Aplic::setSource(uint32_t id, bool asserted, Cycle now,
                                        MsiBus& bus)
  {
    Source& s = srcs_.at(id);
    bool was = s.wire;
    s.wire = asserted;
    bool activation = asserted and not was;   // one MSI per activation event
    if (not activation or not s.enabled)
      return std::nullopt;
    return bus.deliver(id, now);
  }

  Imsic::Imsic(uint32_t nIdentities)
    : pending_(nIdentities, false), enabled_(nIdentities, false),
      arrival_(nIdentities, 0)
  { }

  void Imsic::setEnabled(uint32_t identity, bool en)
  { enabled_.at(identity) = en; }

  void Imsic::deliver(uint32_t identity, Cycle arrivalCycle)
  {
    pending_.at(identity) = true;
    arrival_.at(identity) = arrivalCycle;
  }

  std::optional<uint32_t> Imsic::top() const
  {
    for (uint32_t i = 0; i < pending_.size(); ++i)
      if (pending_[i] and enabled_[i])
        return i;
    return std::nullopt;
  }

  void Imsic::claim(uint32_t identity)
  {
    auto t = top();
    if (not t or *t != identity)
      throw ProtocolError("imsic: claim of non-top identity "
                          + std::to_string(identity));
    pending_[identity] = false;
  }

  bool Imsic::pending(uint32_t identity) const
  { return pending_.at(identity); }

  Cycle Imsic::lastArrivalCycle(uint32_t identity) const
  { return arrival_.at(identity); }

  ClicConfig vanillaClicConfig(ClicConfig cfg)
  {
    cfg.vsprioBits = 0;
    return cfg;
  }

}
