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

#include "vclic/hart.hpp"

#include <algorithm>

namespace vclic
{

  uint64_t CsrFile::readCsr(std::string_view name) const
  {
    if (name == "vsie" or name == "vsip" or name == "vsideleg")
      return 0;   // hardwired: the controller embeds their function
    if (name == "mintthresh")  return mintthresh;
    if (name == "sintthresh")  return sintthresh;
    if (name == "vsintthresh") return vsintthresh;
    if (name == "mtvt")        return mtvt;
    if (name == "stvt")        return stvt;
    if (name == "vstvt")       return vstvt;
    if (name == "vgein")       return vgein;
    throw ProtocolError("readCsr: unknown csr '" + std::string(name) + "'");
  }

  void CsrFile::writeCsr(std::string_view name, uint64_t value)
  {
    if (name == "vsie" or name == "vsip" or name == "vsideleg")
      return;     // write-ignored
    if (name == "mintthresh")       mintthresh = uint8_t(value);
    else if (name == "sintthresh")  sintthresh = uint8_t(value);
    else if (name == "vsintthresh") vsintthresh = uint8_t(value);
    else if (name == "mtvt")        mtvt = value;
    else if (name == "stvt")        stvt = value;
    else if (name == "vstvt")       vstvt = value;
    else if (name == "vgein")       vgein = uint8_t(value & 0x3f);
    else
      throw ProtocolError("writeCsr: unknown csr '" + std::string(name) + "'");
  }

  uint8_t effectiveThreshold(const HartState& st, const CsrFile& csr, Priv cls)
  {
    uint8_t t = csr.threshold(cls);
    for (const IsrFrame& f : st.stack)
      if (f.cls == cls)
        t = std::max(t, f.level);
    return t;
  }

  TakeDecision evalTake(const std::optional<Selection>& sel,
                        const HartState& st, const CsrFile& csr,
                        const VmPrioTable& vmprio)
  {
    TakeDecision d;
    if (not sel)
      return d;
    d.selection = *sel;

    if (sel->privClass == Priv::VS)
      {
        if (st.priv != Priv::VS)
          return d;   // held pending until the hypervisor schedules the VM
        if (sel->vsid == st.runningVsid)
          {
            if (sel->level > effectiveThreshold(st, csr, Priv::VS))
              d.kind = TakeKind::DeliverToRunningVm;
            return d;
          }
        // Foreign VM: trap to HS iff the target VM has strictly higher
        // priority. The priority table is the hypervisor's view whether or
        // not VSPRIO participates in arbitration.
        if (vmprio.prio[sel->vsid] > vmprio.prio[st.runningVsid])
          {
            d.kind = TakeKind::TrapHsForVmSwitch;
            d.targetVsid = sel->vsid;
          }
        return d;
      }

    // M/HS-class interrupt: taken when the class does not rank below the
    // current privilege and the level clears that class's effective
    // threshold (covers both the vertical trap and the horizontal take).
    if (privRank(sel->privClass) >= privRank(st.priv)
        and sel->level > effectiveThreshold(st, csr, sel->privClass))
      {
        d.kind = TakeKind::TrapHigherPriv;
        d.targetPriv = sel->privClass;
      }
    return d;
  }

  void Hart::pushFrame(const Selection& sel, Priv cls)
  {
    IsrFrame f;
    f.cls = cls;
    f.level = sel.level;
    f.id = sel.id;
    f.shv = sel.shv;
    f.vsid = cls == Priv::VS ? sel.vsid : 0;
    if (not st_.stack.empty())
      {
        const IsrFrame& top = st_.stack.back();
        bool increasing = privRank(cls) > privRank(top.cls)
          or (cls == top.cls and f.level > top.level);
        if (not increasing)
          throw ProtocolError("enterTrap: frame does not preempt the in-service handler");
      }
    st_.stack.push_back(f);
    st_.priv = cls;
  }

  LegCosts Hart::enterTrap(const TakeDecision& d, const CostProfile& costs)
  {
    if (d.kind == TakeKind::None or d.kind == TakeKind::TrapHsForVmSwitch)
      throw ProtocolError("enterTrap: decision does not enter a handler");
    Priv cls = d.kind == TakeKind::DeliverToRunningVm ? Priv::VS : d.targetPriv;
    pushFrame(d.selection, cls);
    LegCosts c;
    c.hw = costs.hwTakeCost + (d.selection.shv ? costs.vectorFetchCost : 0);
    c.sw = costs.contextSaveCost + (d.selection.shv ? 0 : costs.swDecodeCost);
    return c;
  }

  LegCosts Hart::exitTrap(const CostProfile& costs)
  {
    if (st_.stack.empty())
      throw ProtocolError("exitTrap: empty handler stack");
    st_.stack.pop_back();
    st_.priv = st_.stack.empty() ? st_.basePriv : st_.stack.back().cls;
    LegCosts c;
    c.sw = costs.contextRestoreCost;
    return c;
  }

  std::optional<Selection> Hart::readNxti(IrqArbiter& ic, Cycle now)
  {
    if (st_.stack.empty())
      throw ProtocolError("readNxti: not in a handler");
    auto sel = ic.arbitrate();
    if (not sel or sel->shv)
      return std::nullopt;   // hardware-vectored interrupts do not tail-chain
    const IsrFrame& top = st_.stack.back();
    if (sel->privClass != top.cls)
      return std::nullopt;
    if (top.cls == Priv::VS and sel->vsid != top.vsid)
      return std::nullopt;
    // Compare against the threshold of the context this frame would
    // return to: the class CSR and any same-class frames below.
    uint8_t eff = csr_.threshold(top.cls);
    for (size_t i = 0; i + 1 < st_.stack.size(); ++i)
      if (st_.stack[i].cls == top.cls)
        eff = std::max(eff, st_.stack[i].level);
    if (sel->level <= eff)
      return std::nullopt;
    ic.claim(sel->id, now);
    return sel;
  }

  LegCosts Hart::tailChain(const Selection& sel, const CostProfile& costs)
  {
    if (st_.stack.empty())
      throw ProtocolError("tailChain: not in a handler");
    IsrFrame& top = st_.stack.back();
    top.level = sel.level;
    top.id = sel.id;
    top.shv = sel.shv;
    LegCosts c;
    c.sw = costs.tailChainCost;
    return c;
  }

}
