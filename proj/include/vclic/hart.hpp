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

#include <optional>
#include <string_view>
#include <vector>

#include "vclic/common.hpp"
#include "vclic/costs.hpp"
#include "vclic/regs.hpp"

namespace vclic
{

  /// CSR file of the interrupt path. vsie, vsip and vsideleg are
  /// architecturally hardwired to zero: their function lives in the
  /// interrupt controller.
  struct CsrFile
  {
    uint8_t mintthresh = 0;
    uint8_t sintthresh = 0;
    uint8_t vsintthresh = 0;
    uint64_t mtvt = 0;
    uint64_t stvt = 0;
    uint64_t vstvt = 0;
    uint8_t vgein = 0;     // VSID of the running VM (hstatus.VGEIN)

    /// Named access used by the harness. Unknown names raise
    /// ProtocolError; the hardwired-zero set reads 0 regardless of writes.
    uint64_t readCsr(std::string_view name) const;
    void writeCsr(std::string_view name, uint64_t value);

    uint8_t threshold(Priv cls) const
    {
      switch (cls)
        {
        case Priv::M:  return mintthresh;
        case Priv::HS: return sintthresh;
        case Priv::VS: return vsintthresh;
        }
      return 0;
    }
  };

  /// One in-service handler. Within a privilege class, stacked frames are
  /// strictly increasing in level.
  struct IsrFrame
  {
    Priv cls = Priv::M;
    uint8_t level = 0;
    uint32_t id = 0;
    bool shv = false;
    uint8_t vsid = 0;
  };

  struct HartState
  {
    Priv priv = Priv::M;
    Priv basePriv = Priv::M;       // context resumed when the stack drains
    uint8_t runningVsid = 0;
    std::vector<IsrFrame> stack;
    Cycle busyUntil = 0;           // background workload, informational
  };

  enum class TakeKind : uint8_t
  {
    None,
    TrapHigherPriv,        // vertical trap (or horizontal take at M/HS)
    DeliverToRunningVm,    // direct injection into the scheduled VM
    TrapHsForVmSwitch      // foreign-VM interrupt with higher VM priority
  };

  struct TakeDecision
  {
    TakeKind kind = TakeKind::None;
    Priv targetPriv = Priv::M;     // valid for TrapHigherPriv
    uint8_t targetVsid = 0;        // valid for TrapHsForVmSwitch
    Selection selection{};
  };

  /// Effective nesting threshold for a class: the max of the class's
  /// xintthresh CSR and the levels of in-service frames of that class.
  uint8_t effectiveThreshold(const HartState& st, const CsrFile& csr, Priv cls);

  /// The take decision, as a pure function of (selection, hart state, CSR
  /// file, VM priority table):
  ///  - a selection of a class outranking the current privilege traps to
  ///    that class, gated by the target class's effective threshold (the
  ///    same rule covers the horizontal M->M / HS->HS take);
  ///  - a VS selection matching the running VM is delivered directly when
  ///    its level clears the VS effective threshold;
  ///  - a VS selection for a different VM traps to HS if and only if the
  ///    target VM's priority is strictly higher than the running VM's;
  ///  - a VS selection while the hart runs HS/M stays pending until the
  ///    hypervisor schedules that VM.
  TakeDecision evalTake(const std::optional<Selection>& sel,
                        const HartState& st, const CsrFile& csr,
                        const VmPrioTable& vmprio);

  /// Raw cycle contributions of one latency leg, split into hardware and
  /// software shares so the micro-architectural jitter model can scale the
  /// software part. Timing composition (jitter, rounding, event times)
  /// happens in the engine.
  struct LegCosts
  {
    double hw = 0;
    double sw = 0;

    double total() const
    { return hw + sw; }
  };

  /// Hart interrupt-path state machine. Cost figures come back as raw
  /// LegCosts; the scenario engine owns the timeline.
  class Hart
  {
  public:
    Hart() = default;

    HartState& state()
    { return st_; }

    const HartState& state() const
    { return st_; }

    CsrFile& csr()
    { return csr_; }

    const CsrFile& csr() const
    { return csr_; }

    TakeDecision evalTake(const std::optional<Selection>& sel,
                          const VmPrioTable& vmprio) const
    { return vclic::evalTake(sel, st_, csr_, vmprio); }

    /// Push the in-service frame for a take decision and return the take
    /// leg costs: hw take plus context save, plus vector fetch (SHV) or
    /// software source decode (direct).
    LegCosts enterTrap(const TakeDecision& d, const CostProfile& costs);

    /// Pop the top frame and return the restore leg cost. ProtocolError on
    /// an empty stack. Callers consult readNxti first; a successful
    /// tail-chain replaces the top frame instead (tailChain below).
    LegCosts exitTrap(const CostProfile& costs);

    /// Tail-chain query against the controller: the current winner, when
    /// it is a direct-mode interrupt of the same class (and same VM for
    /// VS) whose level clears the threshold of the context below the
    /// current frame. Claims the line on success, per the claim-on-read
    /// convention of the next-interrupt CSR.
    std::optional<Selection> readNxti(IrqArbiter& ic, Cycle now);

    /// Swap the top frame for a tail-chained selection.
    LegCosts tailChain(const Selection& sel, const CostProfile& costs);

  private:
    void pushFrame(const Selection& sel, Priv cls);

    HartState st_;
    CsrFile csr_;
  };

}
