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

#include "vclic/engine.hpp"

#include <algorithm>
#include <cmath>

namespace vclic
{

  namespace
  {
    Cycle addCycles(Cycle base, double cycles)
    { return base + Cycle(std::llround(cycles)); }
  }

  Engine::Engine(const Scenario& s)
    : s_(s), c_(s.costs), hv_(s.hypervisor()), asserts_(s.clic.nIrqs),
      switchGranted_(s.clic.nIrqs, false)
  {
    s_.validate();

    decisionPrio_.enabled = s_.clic.vsprioBits > 0;
    for (const VmConfig& vm : s_.vms)
      decisionPrio_.prio[vm.vsid] = vm.prio;

    switch (s_.ic)
      {
      case IcKind::Vclic:
        regs_ = std::make_unique<VclicRegs>(s_.clic);
        break;
      case IcKind::Clic:
        regs_ = std::make_unique<VclicRegs>(vanillaClicConfig(s_.clic));
        break;
      case IcKind::Plic:
        plic_ = std::make_unique<PlicModel>(s_.clic.nIrqs);
        break;
      case IcKind::Aia:
        aia_ = std::make_unique<AiaModel>(s_.clic.nIrqs, s_.bus);
        break;
      }

    hart_.csr().mintthresh = s_.mintthresh;
    hart_.csr().sintthresh = s_.sintthresh;
    hart_.csr().vsintthresh = s_.vsintthresh;

    HartState& st = hart_.state();
    if (s_.mode == VirtMode::BareMetal)
      {
        st.basePriv = Priv::M;
        st.priv = Priv::M;
      }
    else
      {
        st.basePriv = Priv::VS;
        st.priv = Priv::VS;
        st.runningVsid = s_.vms.front().vsid;
        hart_.csr().vgein = st.runningVsid;
      }

    programIc();
  }

  void Engine::programIc()
  {
    bool virt = s_.mode != VirtMode::BareMetal;

    if (regs_)
      {
        // Per-VM priority registers mirror the hypervisor's priorities
        // (truncated to the implemented width).
        if (regs_->config().vsprioBits > 0)
          for (const VmConfig& vm : s_.vms)
            regs_->vmPrio().prio[vm.vsid] =
              uint8_t(vm.prio & ((1u << regs_->config().vsprioBits) - 1));

        if (s_.ic == IcKind::Vclic and virt)
          for (const VmConfig& vm : s_.vms)
            for (uint32_t line : vm.delegatedLines)
              {
                InterruptCell& cell = regs_->cell(line);
                cell.mode = Priv::HS;
                cell.v = true;
                cell.vsid = vm.vsid;
              }

        for (const StimulusEntry& e : s_.stimulus)
          {
            InterruptCell& cell = regs_->cell(e.line);
            cell.ie = true;
            cell.shv = e.shv;
            cell.trig = e.trigger;
            cell.ctl = regs_->config().encodeCtl(e.level, e.priority);
            if (not cell.v)
              cell.mode = virt ? Priv::HS : Priv::M;
          }
      }
    else if (plic_)
      {
        for (const StimulusEntry& e : s_.stimulus)
          {
            uint32_t src = e.line + 1;
            plic_->setEnabled(src, true);
            plic_->setTrigger(src, e.trigger);
            // Keep priorities above the threshold (0); ties resolve to
            // the lowest id, the gateway convention.
            plic_->setPriority(src, uint32_t(e.priority) + 1);
          }
      }
    else if (aia_)
      {
        for (const StimulusEntry& e : s_.stimulus)
          {
            aia_->aplic.setEnabled(e.line, true);
            aia_->aplic.setTrigger(e.line, e.trigger);
            aia_->imsic.setEnabled(e.line, true);
          }
      }
  }

  void Engine::push(Cycle t, EvKind k, uint64_t a, uint64_t b)
  {
    q_.push(Ev{t, seq_++, k, a, b});
    if (k != EvKind::Timeslice)
      ++nonTickEvents_;
  }

  void Engine::emit(Cycle cycle, EventKind kind, int64_t id, int64_t vsid,
                    int8_t priv, int64_t aux)
  {
    trace_.push_back(TraceEvent{cycle, kind, id, vsid, priv, aux});
  }

  void Engine::scheduleStimulus()
  {
    for (uint32_t i = 0; i < s_.stimulus.size(); ++i)
      {
        const StimulusEntry& e = s_.stimulus[i];
        if (not e.at.empty())
          {
            for (Cycle t : e.at)
              push(t, EvKind::Fire, i);
          }
        else
          {
            uint64_t firings = uint64_t(e.count) * s_.iterations;
            for (uint64_t j = 0; j < firings; ++j)
              push(e.start + j * e.period, EvKind::Fire, i);
          }
      }
    if (s_.mode == VirtMode::DynamicHv and s_.timesliceCycles > 0
        and s_.vms.size() > 1)
      push(s_.timesliceCycles, EvKind::Timeslice);
  }

  bool Engine::pendingWork() const
  {
    return unpaired_ > 0 or not frames_.empty() or inSwitch_
      or nonTickEvents_ > 0;
  }

  RunResult Engine::run()
  {
    scheduleStimulus();
    uint64_t processed = 0;
    while (not q_.empty())
      {
        if (++processed > eventBudget_)
          throw ProtocolError("engine: event budget exceeded (runaway scenario)");
        Ev ev = q_.top();
        q_.pop();
        if (ev.kind != EvKind::Timeslice)
          --nonTickEvents_;
        if (preStepBus_ and aia_)
          aia_->bus.stepTo(ev.t);
        switch (ev.kind)
          {
          case EvKind::Fire:        onFire(uint32_t(ev.a), ev.t); break;
          case EvKind::MsiArrive:   onMsiArrive(uint32_t(ev.a), ev.t); break;
          case EvKind::HartEval:    onHartEval(ev.t); break;
          case EvKind::IsrDone:     onIsrDone(ev.a, ev.t); break;
          case EvKind::VmSwitchEnd: onVmSwitchEnd(uint8_t(ev.a), ev.t); break;
          case EvKind::Timeslice:   onTimeslice(ev.t); break;
          }
      }

    RunResult r;
    std::vector<uint64_t> all;
    for (auto& [line, samples] : samples_)
      {
        r.perLine.push_back(LatencyStats::from(int64_t(line), samples));
        all.insert(all.end(), samples.begin(), samples.end());
      }
    r.overall = LatencyStats::from(-1, all);
    std::stable_sort(trace_.begin(), trace_.end(),
                     [](const TraceEvent& a, const TraceEvent& b)
                     { return a.cycle < b.cycle; });
    r.trace = std::move(trace_);
    return r;
  }

  void Engine::onFire(uint32_t entryIx, Cycle t)
  {
    const StimulusEntry& e = s_.stimulus[entryIx];
    uint32_t line = e.line;
    const VmConfig* owner = s_.vmOwningLine(line);
    int64_t vsid = owner ? owner->vsid : -1;

    if (aia_)
      {
        auto arrival = aia_->aplic.setSource(line, true, t, aia_->bus);
        if (e.trigger == Trigger::EdgeRising)
          aia_->aplic.setSource(line, false, t, aia_->bus);
        if (not arrival)
          {
            emit(t, EventKind::LineAssert, line, vsid, -1, 2);   // dropped
            return;
          }
        emit(t, EventKind::LineAssert, line, vsid);
        emit(t, EventKind::MsiEnqueue, line, vsid);
        asserts_[line].push_back(t);
        ++unpaired_;
        push(*arrival, EvKind::MsiArrive, line);
        return;
      }

    bool wasPending = false;
    if (regs_)
      {
        wasPending = regs_->cell(line).ip;
        regs_->setLine(line, true, t);
        if (e.trigger == Trigger::EdgeRising)
          regs_->setLine(line, false, t);
      }
    else if (plic_)
      {
        wasPending = plic_->pending(line + 1) or plic_->claimed(line + 1);
        plic_->setSource(line + 1, true, t);
        if (e.trigger == Trigger::EdgeRising)
          plic_->setSource(line + 1, false, t);
      }

    if (wasPending)
      {
        emit(t, EventKind::LineAssert, line, vsid, -1, 1);   // coalesced
        return;
      }
    emit(t, EventKind::LineAssert, line, vsid);
    asserts_[line].push_back(t);
    ++unpaired_;
    switchGranted_[line] = false;
    push(wire_.deliver(t), EvKind::HartEval);
  }

  void Engine::onMsiArrive(uint32_t line, Cycle t)
  {
    if (aia_->imsic.pending(line))
      {
        // Identity already pending: the write merges. Uncount the assert
        // that produced this MSI (the newest; same-identity writes keep
        // their bus order).
        emit(t, EventKind::MsiArrive, line, -1, -1, 1);
        if (not asserts_[line].empty())
          {
            asserts_[line].pop_back();
            --unpaired_;
          }
        return;
      }
    aia_->imsic.deliver(line, t);
    emit(t, EventKind::MsiArrive, line);
    push(t + wire_.propagationCycles, EvKind::HartEval);
  }

  std::optional<Selection> Engine::currentSelection() const
  {
    if (regs_)
      return regs_->arbitrate();
    if (plic_)
      {
        uint32_t src = plic_->peek();
        if (src == 0)
          return std::nullopt;
        Selection sel;
        sel.id = src - 1;
        sel.privClass = s_.mode == VirtMode::BareMetal ? Priv::M : Priv::HS;
        sel.level = 1;   // no level concept: no nesting on this path
        return sel;
      }
    auto top = aia_->imsic.top();
    if (not top)
      return std::nullopt;
    Selection sel;
    sel.id = *top;
    const VmConfig* owner = s_.vmOwningLine(sel.id);
    if (s_.mode != VirtMode::BareMetal and owner)
      {
        sel.privClass = Priv::VS;
        sel.vsid = owner->vsid;
      }
    else
      sel.privClass = s_.mode == VirtMode::BareMetal ? Priv::M : Priv::HS;
    sel.level = 1;
    return sel;
  }

  void Engine::onHartEval(Cycle t)
  {
    if (inSwitch_)
      return;   // re-evaluated at the switch end
    if (t < transitionEnd_)
      {
        push(transitionEnd_, EvKind::HartEval);
        return;
      }
    auto sel = currentSelection();
    TakeDecision d = hart_.evalTake(sel, decisionPrio_);
    switch (d.kind)
      {
      case TakeKind::None:
        return;
      case TakeKind::TrapHigherPriv:
      case TakeKind::DeliverToRunningVm:
        doTake(d, t);
        return;
      case TakeKind::TrapHsForVmSwitch:
        // One switch per pending episode: if the target VM's threshold then
        // blocks the interrupt, re-trapping out of every other VM for the
        // same still-pending line would livelock the hypervisor.
        if (not switchGranted_[d.selection.id])
          {
            switchGranted_[d.selection.id] = true;
            beginSwitch(t, d.targetVsid, int64_t(d.selection.id));
          }
        return;
      }
  }

  double Engine::bodyCyclesFor(const Selection& sel) const
  {
    const VmConfig* owner = s_.vmOwningLine(sel.id);
    if (owner and owner->isrBodyCycles >= 0)
      return owner->isrBodyCycles;
    if (not owner and s_.isrBodyCycles >= 0)
      return s_.isrBodyCycles;
    return c_.isrBodyCycles;
  }

  void Engine::recordDelivery(uint32_t line, Cycle firstInsn)
  {
    if (asserts_[line].empty())
      throw ProtocolError("engine: delivery without a matching assert on line "
                          + std::to_string(line));
    Cycle assert0 = asserts_[line].front();
    asserts_[line].pop_front();
    --unpaired_;
    ++deliveredCount_;
    switchGranted_[line] = false;
    uint64_t latency = firstInsn - assert0;
    samples_[line].push_back(latency);
    const VmConfig* owner = s_.vmOwningLine(line);
    emit(firstInsn, EventKind::IsrFirstInsn, line, owner ? owner->vsid : -1,
         int8_t(privRank(hart_.state().priv)), int64_t(latency));
  }

  void Engine::doTake(const TakeDecision& d, Cycle t)
  {
    const Selection& sel = d.selection;

    if (regs_)
      regs_->claim(sel.id, t);
    else if (plic_)
      {
        uint32_t got = plic_->claim(t);
        if (got != sel.id + 1)
          throw ProtocolError("engine: plic claim mismatch");
      }
    else
      aia_->imsic.claim(sel.id);

    Priv cls = d.kind == TakeKind::DeliverToRunningVm ? Priv::VS : d.targetPriv;
    emit(t, EventKind::Selection, sel.id,
         sel.privClass == Priv::VS ? sel.vsid : -1,
         int8_t(privRank(sel.privClass)), int64_t(sel.level));
    emit(t, EventKind::TrapEnter, sel.id, -1, int8_t(privRank(cls)),
         int64_t(sel.level));

    // Pause the preempted handler, if any.
    if (not frames_.empty())
      {
        FrameInfo& outer = frames_.back();
        outer.bodyRemaining = double(outer.doneAt - t);
        outer.gen = ++genCounter_;   // invalidates its queued done event
      }

    LegCosts legs = hart_.enterTrap(d, c_);
    const VmConfig* owner = s_.vmOwningLine(sel.id);
    if (s_.mode != VirtMode::BareMetal and owner)
      legs.sw += emulationLatency(s_.ic, c_);   // 0 for vclic and aia
    if (plic_)
      legs.sw += c_.mmioCost;   // the claim read
    double dur = applyJitter(legs.sw, legs.total(), s_.uarch, c_).total;
    Cycle firstInsn = addCycles(t, dur);

    recordDelivery(sel.id, firstInsn);

    double body = bodyCyclesFor(sel);
    FrameInfo fi;
    fi.gen = ++genCounter_;
    fi.line = sel.id;
    fi.bodyRemaining = body;
    fi.doneAt = addCycles(firstInsn, body);
    // The handler deasserts a level-triggered device before exiting.
    fi.levelSource = false;
    for (const StimulusEntry& e : s_.stimulus)
      if (e.line == sel.id)
        {
          fi.levelSource = e.trigger == Trigger::LevelHigh;
          break;
        }
    frames_.push_back(fi);

    transitionEnd_ = firstInsn;
    push(fi.doneAt, EvKind::IsrDone, fi.gen);
  }

  void Engine::deassertSource(uint32_t line, Cycle t)
  {
    if (regs_)
      regs_->setLine(line, false, t);
    else if (plic_)
      plic_->setSource(line + 1, false, t);
    else if (aia_)
      aia_->aplic.setSource(line, false, t, aia_->bus);
  }

  void Engine::onIsrDone(uint64_t gen, Cycle t)
  {
    if (frames_.empty() or frames_.back().gen != gen)
      return;   // stale: the frame was preempted or tail-chained away
    FrameInfo fi = frames_.back();

    // The handler serviced its device: drop a level source before looking
    // for more work, then release the claim on the PLIC.
    if (fi.levelSource)
      deassertSource(fi.line, t);
    if (plic_)
      plic_->complete(fi.line + 1);

    // Tail-chaining: only on a CLIC-family controller whose CSRs the
    // handler reaches directly (an emulated guest traps on every access,
    // so it takes the full exit/enter path instead).
    bool nxtiReachable = regs_ != nullptr
      and (s_.ic == IcKind::Vclic or s_.mode == VirtMode::BareMetal);
    if (nxtiReachable)
      {
        auto nx = hart_.readNxti(*regs_, t);
        if (nx)
          {
            emit(t, EventKind::TailChain, nx->id,
                 nx->privClass == Priv::VS ? nx->vsid : -1,
                 int8_t(privRank(hart_.state().priv)), int64_t(nx->level));
            LegCosts legs = hart_.tailChain(*nx, c_);
            double dur = applyJitter(legs.sw, legs.total(), s_.uarch, c_).total;
            Cycle firstInsn = addCycles(t, dur);
            recordDelivery(nx->id, firstInsn);
            double body = bodyCyclesFor(*nx);
            FrameInfo& top = frames_.back();
            top.gen = ++genCounter_;
            top.line = nx->id;
            top.bodyRemaining = body;
            top.doneAt = addCycles(firstInsn, body);
            top.levelSource = false;
            for (const StimulusEntry& e : s_.stimulus)
              if (e.line == nx->id)
                {
                  top.levelSource = e.trigger == Trigger::LevelHigh;
                  break;
                }
            transitionEnd_ = firstInsn;
            push(top.doneAt, EvKind::IsrDone, top.gen);
            return;
          }
      }

    fullExit(t);
  }

  void Engine::fullExit(Cycle t)
  {
    uint32_t line = frames_.back().line;
    LegCosts legs = hart_.exitTrap(c_);
    double dur = applyJitter(legs.sw, legs.total(), s_.uarch, c_).total;
    Cycle resume = addCycles(t, dur);
    frames_.pop_back();
    emit(resume, EventKind::IsrExit, int64_t(line), -1,
         int8_t(privRank(hart_.state().priv)));
    transitionEnd_ = resume;
    if (not frames_.empty())
      {
        FrameInfo& outer = frames_.back();
        outer.doneAt = addCycles(resume, outer.bodyRemaining);
        outer.gen = ++genCounter_;
        push(outer.doneAt, EvKind::IsrDone, outer.gen);
      }
    push(resume, EvKind::HartEval);
  }

  void Engine::beginSwitch(Cycle t, uint8_t target, int64_t triggerLine)
  {
    uint8_t from = hart_.state().runningVsid;

    // Park the outgoing guest's in-service handlers; they resume when the
    // guest is scheduled back in.
    if (not frames_.empty())
      {
        SavedGuestCtx ctx;
        ctx.hartFrames = hart_.state().stack;
        ctx.engineFrames = frames_;
        ctx.engineFrames.back().bodyRemaining =
          double(ctx.engineFrames.back().doneAt - t);
        savedCtx_[from] = std::move(ctx);
        frames_.clear();
        hart_.state().stack.clear();
      }
    hart_.state().priv = Priv::HS;
    inSwitch_ = true;

    double entry = applyJitter(c_.hvTrapEntryCost, c_.hvTrapEntryCost,
                               s_.uarch, c_).total;
    Cycle beginAt = addCycles(t, entry);
    if (triggerLine >= 0)
      emit(t, EventKind::TrapEnter, triggerLine, target,
           int8_t(privRank(Priv::HS)));
    emit(beginAt, EventKind::VmSwitchBegin, triggerLine, from, -1,
         int64_t(target));

    double switchCost = vmContextSwitchCost(from, target, hv_, c_);
    double adjusted = applyJitter(switchCost, switchCost, s_.uarch, c_).total;
    push(addCycles(beginAt, adjusted), EvKind::VmSwitchEnd, target);
  }

  void Engine::onVmSwitchEnd(uint8_t target, Cycle t)
  {
    HartState& st = hart_.state();
    st.runningVsid = target;
    st.priv = Priv::VS;
    hart_.csr().vgein = target;
    inSwitch_ = false;
    emit(t, EventKind::VmSwitchEnd, -1, int64_t(target));

    auto it = savedCtx_.find(target);
    if (it != savedCtx_.end())
      {
        st.stack = it->second.hartFrames;
        st.priv = st.stack.empty() ? st.basePriv : st.stack.back().cls;
        frames_ = it->second.engineFrames;
        savedCtx_.erase(it);
        if (not frames_.empty())
          {
            FrameInfo& top = frames_.back();
            top.gen = ++genCounter_;
            top.doneAt = addCycles(t, top.bodyRemaining);
            push(top.doneAt, EvKind::IsrDone, top.gen);
          }
      }
    // Keep round-robin rotation aligned with whoever runs now.
    for (size_t i = 0; i < s_.vms.size(); ++i)
      if (s_.vms[i].vsid == target)
        rrIndex_ = i;
    push(t, EvKind::HartEval);
  }

  bool Engine::deliverableInSomeVm(const std::optional<Selection>& sel) const
  {
    if (not sel)
      return false;
    for (const VmConfig& vm : s_.vms)
      {
        HartState idle;
        idle.priv = Priv::VS;
        idle.basePriv = Priv::VS;
        idle.runningVsid = vm.vsid;
        TakeKind k = evalTake(sel, idle, hart_.csr(), decisionPrio_).kind;
        // Only an actual delivery is progress; a hypervisor trap that
        // switches into a VM whose threshold still blocks the interrupt
        // delivers nothing.
        if (k == TakeKind::DeliverToRunningVm or k == TakeKind::TrapHigherPriv)
          return true;
      }
    return false;
  }

  void Engine::onTimeslice(Cycle t)
  {
    if (not pendingWork())
      return;   // nothing outstanding: the scheduler goes quiet
    // A pending winner that no VM context would ever take (blocked by a
    // threshold) cannot be helped by rotation either; once the system is
    // otherwise idle, stop rescheduling so the run terminates.
    bool quiescent = not inSwitch_ and frames_.empty() and nonTickEvents_ == 0;
    if (quiescent and not deliverableInSomeVm(currentSelection()))
      return;

    if (not inSwitch_ and frames_.empty() and s_.vms.size() > 1)
      {
        size_t next = (rrIndex_ + 1) % s_.vms.size();
        uint8_t target = s_.vms[next].vsid;
        if (target != hart_.state().runningVsid)
          beginSwitch(t, target, -1);
        rrIndex_ = next;
      }
    push(t + s_.timesliceCycles, EvKind::Timeslice);
  }

  std::vector<TraceEvent> Engine::partialTrace() const
  {
    std::vector<TraceEvent> t = trace_;
    std::stable_sort(t.begin(), t.end(),
                     [](const TraceEvent& a, const TraceEvent& b)
                     { return a.cycle < b.cycle; });
    return t;
  }

  RunResult runScenario(const Scenario& s)
  {
    Engine e(s);
    return e.run();
  }

}
