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

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <queue>

#include "vclic/hart.hpp"
#include "vclic/ic_alt.hpp"
#include "vclic/scenario.hpp"
#include "vclic/trace.hpp"

namespace vclic
{

  /// Deterministic event-driven runner for one scenario: replays the
  /// stimulus into the selected interrupt subsystem, drives the hart's
  /// take/nest/tail-chain state machine with the scenario's cost profile,
  /// and collects latency samples plus a time-ordered trace.
  ///
  /// Latency of one delivery is cycle(isr_first_insn) - cycle(line_assert),
  /// software contributions included. Timing conventions: a take decided
  /// while a trap entry is in flight waits for the entry to complete;
  /// interrupts arriving during a VM context switch are held to the switch
  /// end; a preemption switch is granted once per pending episode of a
  /// line. A simulation instance is confined to a single thread but freely
  /// movable between threads.
  class Engine
  {
  public:
    explicit Engine(const Scenario& s);

    RunResult run();

    /// Step the MSI bus eagerly to every event boundary instead of letting
    /// deliveries fast-forward it. Observable results are identical; used
    /// to test that equivalence.
    void setPreStepBus(bool b)
    { preStepBus_ = b; }

    /// Events recorded so far, time-ordered. After an aborted run this is
    /// the diagnostic suffix material.
    std::vector<TraceEvent> partialTrace() const;

  private:
    enum class EvKind : uint8_t
    { Fire, MsiArrive, HartEval, IsrDone, VmSwitchEnd, Timeslice };

    struct Ev
    {
      Cycle t = 0;
      uint64_t seq = 0;
      EvKind kind = EvKind::Fire;
      uint64_t a = 0;
      uint64_t b = 0;
    };

    struct EvOrder
    {
      bool operator()(const Ev& x, const Ev& y) const
      { return x.t != y.t ? x.t > y.t : x.seq > y.seq; }
    };

    struct FrameInfo
    {
      uint64_t gen = 0;
      uint32_t line = 0;
      double bodyRemaining = 0;
      Cycle doneAt = 0;
      bool levelSource = false;
    };

    struct SavedGuestCtx
    {
      std::vector<IsrFrame> hartFrames;
      std::vector<FrameInfo> engineFrames;
    };

    void programIc();
    void scheduleStimulus();
    void push(Cycle t, EvKind k, uint64_t a = 0, uint64_t b = 0);
    void emit(Cycle cycle, EventKind kind, int64_t id = -1, int64_t vsid = -1,
              int8_t priv = -1, int64_t aux = -1);

    void onFire(uint32_t entryIx, Cycle t);
    void onMsiArrive(uint32_t line, Cycle t);
    void onHartEval(Cycle t);
    void onIsrDone(uint64_t gen, Cycle t);
    void onVmSwitchEnd(uint8_t target, Cycle t);
    void onTimeslice(Cycle t);

    std::optional<Selection> currentSelection() const;
    bool deliverableInSomeVm(const std::optional<Selection>& sel) const;
    void doTake(const TakeDecision& d, Cycle t);
    void fullExit(Cycle t);
    void beginSwitch(Cycle t, uint8_t target, int64_t triggerLine);
    void recordDelivery(uint32_t line, Cycle firstInsn);
    double bodyCyclesFor(const Selection& sel) const;
    bool pendingWork() const;
    void deassertSource(uint32_t line, Cycle t);

    Scenario s_;
    CostProfile c_;
    HypervisorModel hv_;
    WiredFabric wire_;
    VmPrioTable decisionPrio_;   // hypervisor's view of VM priorities

    std::unique_ptr<VclicRegs> regs_;   // vclic and vanilla clic
    std::unique_ptr<PlicModel> plic_;
    std::unique_ptr<AiaModel> aia_;

    Hart hart_;
    std::priority_queue<Ev, std::vector<Ev>, EvOrder> q_;
    uint64_t seq_ = 0;
    uint64_t nonTickEvents_ = 0;
    uint64_t genCounter_ = 0;

    std::vector<FrameInfo> frames_;
    Cycle transitionEnd_ = 0;
    bool inSwitch_ = false;
    size_t rrIndex_ = 0;
    std::map<uint8_t, SavedGuestCtx> savedCtx_;

    std::vector<std::deque<Cycle>> asserts_;
    std::map<uint32_t, std::vector<uint64_t>> samples_;
    uint64_t unpaired_ = 0;
    uint64_t deliveredCount_ = 0;
    std::vector<bool> switchGranted_;
    uint64_t eventBudget_ = 50'000'000;
    std::vector<TraceEvent> trace_;
    bool preStepBus_ = false;
  };

  RunResult runScenario(const Scenario& s);

}
