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

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "vclic/common.hpp"

namespace vclic
{

  /// Static configuration of the interrupt controller.
  struct ClicConfig
  {
    unsigned nIrqs = 64;              // input lines
    unsigned ctlBits = 8;             // implemented bits of the control byte
    unsigned nlbits = 4;              // of ctlBits, how many encode the level
    unsigned vsidBits = 6;            // fixed: up to 64 guests
    unsigned vsprioBits = 3;          // per-VM priority width; 0 = absent
    uint64_t regionStrideBytes = 0x10000;

    /// Throws ValidationError when out of range. The fixed register map
    /// (per-line block at 0x1000, clicintv at 0x2000, VSPRIO at 0x3000)
    /// caps nIrqs at 1024: beyond that the per-line block would overlap
    /// the clicintv array.
    void validate() const;

    unsigned numVsids() const
    { return 1u << vsidBits; }

    uint64_t apertureBytes() const
    { return regionStrideBytes * (2 + numVsids()); }

    /// Mask of control-byte bits that are not implemented. They read as
    /// all-ones so that narrow implementations still get nonzero default
    /// levels.
    uint8_t ctlOnesMask() const
    { return uint8_t((1u << (8 - ctlBits)) - 1); }

    struct CtlDecode
    {
      uint8_t level = 0;
      uint8_t priority = 0;
    };

    /// Split a control byte into (level, priority). The upper nlbits of
    /// the implemented field are the level, the remaining implemented bits
    /// the priority. With nlbits = 0 every interrupt shares one implicit
    /// level, the maximum (255). A zero-width priority field decodes to 0.
    CtlDecode decodeCtl(uint8_t ctl) const;

    /// Inverse of decodeCtl on the implemented bits; unimplemented low
    /// bits come back as ones.
    uint8_t encodeCtl(uint8_t level, uint8_t priority) const;
  };

  enum class Trigger : uint8_t { LevelHigh = 0, EdgeRising = 1 };

  /// Per-line state. The attribute privilege mode is M or S (never VS:
  /// virtualization is the orthogonal v bit). mode == M forces v == 0;
  /// M-mode interrupts cannot be delegated to a VM, and writes that would
  /// break this drop the v bit.
  struct InterruptCell
  {
    bool ip = false;                  // pending
    bool ie = false;                  // enabled
    bool shv = false;                 // selective hardware vectoring
    Trigger trig = Trigger::LevelHigh;
    Priv mode = Priv::M;              // M or HS (the S attribute)
    uint8_t ctl = 0;                  // raw control byte
    bool v = false;                   // delegated to a VM
    uint8_t vsid = 0;                 // target VM when v is set
  };

  /// Per-VM priority table (the VSPRIO register bank). When not enabled
  /// the contents have no effect on arbitration.
  struct VmPrioTable
  {
    std::array<uint8_t, 64> prio{};
    bool enabled = false;
  };

  /// Who is performing an MMIO access. vsid is meaningful only for VS.
  struct AccessContext
  {
    Priv priv = Priv::M;
    uint8_t vsid = 0;
  };

  /// Arbitration winner handed from the controller to the hart.
  struct Selection
  {
    uint32_t id = 0;
    Priv privClass = Priv::M;
    uint8_t vmPrio = 0;               // 0 unless a VS line with VSPRIO active
    uint8_t level = 0;
    uint8_t priority = 0;
    bool shv = false;
    uint8_t vsid = 0;                 // target VM when privClass == VS

    bool operator==(const Selection&) const = default;
  };

  enum class MmioStatus : uint8_t { Ok, UnmappedAddress, AccessFault };

  struct MmioResult
  {
    MmioStatus status = MmioStatus::Ok;
    uint32_t value = 0;

    bool ok() const
    { return status == MmioStatus::Ok; }
  };

  enum class RegKind : uint8_t { Ip, Ie, Attr, Ctl, V, Vsprio };

  /// Result of address decode: which privilege region the offset falls in
  /// and which byte register it names inside that region.
  struct DecodedAddr
  {
    enum class Region : uint8_t { M, HS, VM } region = Region::M;
    uint8_t vsid = 0;                 // valid when region == VM
    RegKind reg = RegKind::Ip;
    uint32_t index = 0;

    bool operator==(const DecodedAddr&) const = default;
  };

  /// Core-facing interface of an interrupt controller: present the current
  /// winner and accept a claim handshake.
  class IrqArbiter
  {
  public:
    virtual ~IrqArbiter() = default;
    virtual std::optional<Selection> arbitrate() const = 0;
    virtual void claim(uint32_t id, Cycle now) = 0;
  };

  /// Golden model of the virtualization-capable CLIC register file:
  /// privilege/VSID-partitioned MMIO decode, per-line configuration, the
  /// per-VM priority table, and arbitration.
  ///
  /// Register map, byte offsets within each region:
  ///   clicintip[i]   0x1000 + 4i
  ///   clicintie[i]   0x1000 + 4i + 1
  ///   clicintattr[i] 0x1000 + 4i + 2   bit0 = shv, bit1 = trig,
  ///                                    bits 7:6 = mode (11 = M, else S)
  ///   clicintctl[i]  0x1000 + 4i + 3
  ///   clicintv[i]    0x2000 + i        bit7 = v, bits 5:0 = vsid,
  ///                                    bit6 reserved (M/HS regions only)
  ///   VSPRIO[v]      0x3000 + v        (M/HS regions only; absent when
  ///                                    vsprioBits == 0)
  /// Regions: M at stride*0, HS at stride*1, VM(v) at stride*(2+v).
  /// 1-byte accesses and aligned 4-byte accesses are supported; a 4-byte
  /// access at 0x1000+4i moves the (ip, ie, attr, ctl) bundle
  /// little-endian.
  class VclicRegs : public IrqArbiter
  {
  public:
    explicit VclicRegs(const ClicConfig& cfg);

    const ClicConfig& config() const
    { return cfg_; }

    // --- wire side ------------------------------------------------------

    /// Drive input line id. Level-triggered lines track the wire;
    /// edge-triggered lines latch pending on a rising edge and hold it
    /// until claimed. The cycle of each 0->1 pending transition is
    /// recorded for latency measurement.
    void setLine(uint32_t id, bool asserted, Cycle now);

    bool wireState(uint32_t id) const
    { return wire_.at(id); }

    // --- bus side -------------------------------------------------------

    /// Pure address arithmetic: map a byte offset inside the aperture to
    /// (region, register). Returns nullopt for unmapped offsets. No
    /// privilege is involved at this stage.
    std::optional<DecodedAddr> decodeAddress(uint64_t offset) const;

    /// Read width bytes (1 or 4, 4 must be aligned) at offset on behalf of
    /// ctx. Region-level privilege violations return AccessFault (modeling
    /// a PMP/stage-2 fault taken by the platform). Inside a permitted VM
    /// region, lines not delegated to that VM read as zero, and the
    /// clicintv/VSPRIO banks read as zero.
    MmioResult mmioRead(uint64_t offset, unsigned width, AccessContext ctx) const;

    /// Write counterpart of mmioRead. Writes to invisible lines inside a
    /// permitted VM region are silently ignored, as are clicintv/VSPRIO
    /// writes from VM regions and all reserved bits.
    MmioStatus mmioWrite(uint64_t offset, unsigned width, uint32_t value,
                         AccessContext ctx);

    // --- core side ------------------------------------------------------

    /// Highest-ranked pending-and-enabled line, or nullopt. The ranking
    /// key is (privilege class, VM priority, level, priority, id),
    /// compared lexicographically; ties fall to the highest id. Computed
    /// with a balanced reduction tree; behavior is that of a linear scan.
    std::optional<Selection> arbitrate() const override;

    /// Claim line id. Must be the current arbitration winner (else
    /// ProtocolError). Edge-triggered lines drop pending; level-triggered
    /// lines stay pending until the wire deasserts.
    void claim(uint32_t id, Cycle now) override;

    // --- direct state access (harness and test setup) --------------------

    InterruptCell& cell(uint32_t id)
    { return cells_.at(id); }

    const InterruptCell& cell(uint32_t id) const
    { return cells_.at(id); }

    VmPrioTable& vmPrio()
    { return vmprio_; }

    const VmPrioTable& vmPrio() const
    { return vmprio_; }

    /// Cycle of the most recent 0->1 pending transition of line id.
    Cycle lastAssertCycle(uint32_t id) const
    { return assertCycle_.at(id); }

    Cycle lastClaimCycle(uint32_t id) const
    { return claimCycle_.at(id); }

  private:
    // Packed arbitration key; 0 means ineligible.
    uint64_t lineKey(uint32_t id) const;
    Selection makeSelection(uint32_t id) const;

    uint8_t readByte(const DecodedAddr& d, const AccessContext& ctx) const;
    void writeByte(const DecodedAddr& d, uint8_t value, const AccessContext& ctx);
    bool regionPermits(const DecodedAddr& d, const AccessContext& ctx) const;
    bool lineVisible(const DecodedAddr& d, uint32_t id) const;

    ClicConfig cfg_;
    std::vector<InterruptCell> cells_;
    std::vector<bool> wire_;
    std::vector<Cycle> assertCycle_;
    std::vector<Cycle> claimCycle_;
    VmPrioTable vmprio_;
  };

}
