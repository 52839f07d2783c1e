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

#include "vclic/regs.hpp"

#include <cassert>

namespace vclic
{

  namespace
  {
    constexpr uint64_t kLineBlockBase = 0x1000;
    constexpr uint64_t kVBlockBase = 0x2000;
    constexpr uint64_t kVsprioBlockBase = 0x3000;

    constexpr uint8_t kAttrModeM = 0b11;
    constexpr uint8_t kAttrModeS = 0b01;
  }

  void ClicConfig::validate() const
  {
    if (nIrqs < 1 or nIrqs > 4096)
      throw ValidationError("clic.n_irqs: must be in 1..4096");
    if (ctlBits < 2 or ctlBits > 8)
      throw ValidationError("clic.ctl_bits: must be in 2..8");
    if (nlbits > ctlBits)
      throw ValidationError("clic.nlbits: must not exceed ctl_bits");
    if (vsidBits != 6)
      throw ValidationError("clic.vsid_bits: fixed at 6");
    if (vsprioBits > 8)
      throw ValidationError("clic.vsprio_bits: must be in 0..8");
    // The per-line block ends at 0x1000 + 4*nIrqs and must not run into
    // the clicintv array at 0x2000.
    if (kLineBlockBase + 4ull * nIrqs > kVBlockBase)
      throw ValidationError("clic.n_irqs: register map supports at most 1024 lines");
    if (regionStrideBytes < kVsprioBlockBase + 64 or (regionStrideBytes % 4) != 0)
      throw ValidationError("clic.region_stride_bytes: must be a 4-byte multiple covering the register map");
  }

  ClicConfig::CtlDecode ClicConfig::decodeCtl(uint8_t ctl) const
  {
    uint8_t padded = uint8_t(ctl | ctlOnesMask());
    CtlDecode d;
    d.level = nlbits ? uint8_t(padded >> (8 - nlbits)) : uint8_t(255);
    unsigned prioWidth = ctlBits - nlbits;
    d.priority = prioWidth
      ? uint8_t((padded >> (8 - ctlBits)) & ((1u << prioWidth) - 1))
      : uint8_t(0);
    return d;
  }

  uint8_t ClicConfig::encodeCtl(uint8_t level, uint8_t priority) const
  {
    unsigned prioWidth = ctlBits - nlbits;
    uint8_t ctl = ctlOnesMask();
    if (nlbits)
      ctl |= uint8_t((level & ((1u << nlbits) - 1)) << (8 - nlbits));
    if (prioWidth)
      ctl |= uint8_t((priority & ((1u << prioWidth) - 1)) << (8 - ctlBits));
    return ctl;
  }

  VclicRegs::VclicRegs(const ClicConfig& cfg)
    : cfg_(cfg), cells_(cfg.nIrqs), wire_(cfg.nIrqs, false),
      assertCycle_(cfg.nIrqs, 0), claimCycle_(cfg.nIrqs, 0)
  {
    cfg_.validate();
    vmprio_.enabled = cfg_.vsprioBits > 0;
  }

  void VclicRegs::setLine(uint32_t id, bool asserted, Cycle now)
  {
    if (id >= cfg_.nIrqs)
      throw ProtocolError("setLine: line out of range");
    InterruptCell& c = cells_[id];
    bool was = wire_[id];
    wire_[id] = asserted;
    if (c.trig == Trigger::LevelHigh)
      {
        bool wasPending = c.ip;
        c.ip = asserted;
        if (c.ip and not wasPending)
          assertCycle_[id] = now;
      }
    else if (asserted and not was)
      {
        if (not c.ip)
          assertCycle_[id] = now;
        c.ip = true;   // latched until claim; further edges are no-ops
      }
  }

  std::optional<DecodedAddr> VclicRegs::decodeAddress(uint64_t offset) const
  {
    if (offset >= cfg_.apertureBytes())
      return std::nullopt;

    uint64_t regionIx = offset / cfg_.regionStrideBytes;
    uint64_t within = offset % cfg_.regionStrideBytes;

    DecodedAddr d;
    if (regionIx == 0)
      d.region = DecodedAddr::Region::M;
    else if (regionIx == 1)
      d.region = DecodedAddr::Region::HS;
    else
      {
        d.region = DecodedAddr::Region::VM;
        d.vsid = uint8_t(regionIx - 2);
      }

    if (within >= kLineBlockBase and within < kLineBlockBase + 4ull * cfg_.nIrqs)
      {
        uint64_t rel = within - kLineBlockBase;
        d.index = uint32_t(rel / 4);
        switch (rel % 4)
          {
          case 0: d.reg = RegKind::Ip; break;
          case 1: d.reg = RegKind::Ie; break;
          case 2: d.reg = RegKind::Attr; break;
          default: d.reg = RegKind::Ctl; break;
          }
        return d;
      }
    if (within >= kVBlockBase and within < kVBlockBase + cfg_.nIrqs)
      {
        d.reg = RegKind::V;
        d.index = uint32_t(within - kVBlockBase);
        return d;
      }
    if (cfg_.vsprioBits > 0
        and within >= kVsprioBlockBase and within < kVsprioBlockBase + cfg_.numVsids())
      {
        d.reg = RegKind::Vsprio;
        d.index = uint32_t(within - kVsprioBlockBase);
        return d;
      }
    return std::nullopt;
  }

  bool VclicRegs::regionPermits(const DecodedAddr& d, const AccessContext& ctx) const
  {
    switch (d.region)
      {
      case DecodedAddr::Region::M:
        return ctx.priv == Priv::M;
      case DecodedAddr::Region::HS:
        return ctx.priv == Priv::M or ctx.priv == Priv::HS;
      case DecodedAddr::Region::VM:
        return ctx.priv == Priv::M or ctx.priv == Priv::HS
          or (ctx.priv == Priv::VS and ctx.vsid == d.vsid);
      }
    return false;
  }

  bool VclicRegs::lineVisible(const DecodedAddr& d, uint32_t id) const
  {
    if (d.region != DecodedAddr::Region::VM)
      return true;
    const InterruptCell& c = cells_[id];
    return c.v and c.vsid == d.vsid;
  }

  uint8_t VclicRegs::readByte(const DecodedAddr& d, const AccessContext&) const
  {
    bool vmRegion = d.region == DecodedAddr::Region::VM;
    switch (d.reg)
      {
      case RegKind::Ip:
      case RegKind::Ie:
      case RegKind::Attr:
      case RegKind::Ctl:
        {
          if (not lineVisible(d, d.index))
            return 0;
          const InterruptCell& c = cells_[d.index];
          switch (d.reg)
            {
            case RegKind::Ip:   return c.ip ? 1 : 0;
            case RegKind::Ie:   return c.ie ? 1 : 0;
            case RegKind::Attr:
              {
                uint8_t mode = (c.mode == Priv::M) ? kAttrModeM : kAttrModeS;
                return uint8_t((c.shv ? 1 : 0)
                               | (c.trig == Trigger::EdgeRising ? 2 : 0)
                               | (mode << 6));
              }
            default:            return uint8_t(c.ctl | cfg_.ctlOnesMask());
            }
        }
      case RegKind::V:
        if (vmRegion)
          return 0;   // hypervisor-only bank
        {
          const InterruptCell& c = cells_[d.index];
          return uint8_t((c.v ? 0x80 : 0) | (c.vsid & 0x3f));
        }
      case RegKind::Vsprio:
        if (vmRegion)
          return 0;
        return vmprio_.prio[d.index];
      }
    return 0;
  }

  void VclicRegs::writeByte(const DecodedAddr& d, uint8_t value, const AccessContext&)
  {
    bool vmRegion = d.region == DecodedAddr::Region::VM;
    switch (d.reg)
      {
      case RegKind::Ip:
        {
          if (vmRegion)
            return;   // pending is hardware-owned from guest regions
          InterruptCell& c = cells_[d.index];
          if (c.trig == Trigger::EdgeRising)
            c.ip = value & 1;   // test hook for edge lines
          return;
        }
      case RegKind::Ie:
        {
          if (not lineVisible(d, d.index))
            return;
          cells_[d.index].ie = value & 1;
          return;
        }
      case RegKind::Attr:
        {
          if (not lineVisible(d, d.index))
            return;
          InterruptCell& c = cells_[d.index];
          c.shv = value & 1;
          c.trig = (value & 2) ? Trigger::EdgeRising : Trigger::LevelHigh;
          if (not vmRegion)
            {
              // Guests cannot change the mode attribute: flipping it to M
              // would drop the v bit and alter delegation state.
              c.mode = ((value >> 6) == kAttrModeM) ? Priv::M : Priv::HS;
              if (c.mode == Priv::M)
                c.v = false;
            }
          return;
        }
      case RegKind::Ctl:
        {
          if (not lineVisible(d, d.index))
            return;
          cells_[d.index].ctl = value;
          return;
        }
      case RegKind::V:
        {
          if (vmRegion)
            return;
          InterruptCell& c = cells_[d.index];
          c.vsid = value & 0x3f;   // bit 6 reserved, write-ignored
          c.v = (value & 0x80) and c.mode != Priv::M;
          return;
        }
      case RegKind::Vsprio:
        {
          if (vmRegion)
            return;
          vmprio_.prio[d.index] =
            uint8_t(value & ((1u << cfg_.vsprioBits) - 1));
          return;
        }
      }
  }

  MmioResult VclicRegs::mmioRead(uint64_t offset, unsigned width,
                                 AccessContext ctx) const
  {
    if ((width != 1 and width != 4) or (width == 4 and offset % 4 != 0))
      return {MmioStatus::UnmappedAddress, 0};

    uint32_t value = 0;
    for (unsigned i = 0; i < width; ++i)
      {
        auto d = decodeAddress(offset + i);
        if (not d)
          return {MmioStatus::UnmappedAddress, 0};
        if (not regionPermits(*d, ctx))
          return {MmioStatus::AccessFault, 0};
        value |= uint32_t(readByte(*d, ctx)) << (8 * i);
      }
    return {MmioStatus::Ok, value};
  }

  MmioStatus VclicRegs::mmioWrite(uint64_t offset, unsigned width,
                                  uint32_t value, AccessContext ctx)
  {
    if ((width != 1 and width != 4) or (width == 4 and offset % 4 != 0))
      return MmioStatus::UnmappedAddress;

    // Validate the whole access before mutating anything.
    std::array<DecodedAddr, 4> decoded;
    for (unsigned i = 0; i < width; ++i)
      {
        auto d = decodeAddress(offset + i);
        if (not d)
          return MmioStatus::UnmappedAddress;
        if (not regionPermits(*d, ctx))
          return MmioStatus::AccessFault;
        decoded[i] = *d;
      }
    for (unsigned i = 0; i < width; ++i)
      writeByte(decoded[i], uint8_t(value >> (8 * i)), ctx);
    return MmioStatus::Ok;
  }

  uint64_t VclicRegs::lineKey(uint32_t id) const
  {
    const InterruptCell& c = cells_[id];
    if (not (c.ip and c.ie))
      return 0;
    Priv cls = c.v ? Priv::VS : c.mode;
    uint8_t vmPrio = (cls == Priv::VS and vmprio_.enabled) ? vmprio_.prio[c.vsid] : 0;
    auto dec = cfg_.decodeCtl(c.ctl);
    return (uint64_t(1) << 63)
      | (uint64_t(privRank(cls)) << 44)
      | (uint64_t(vmPrio) << 36)
      | (uint64_t(dec.level) << 28)
      | (uint64_t(dec.priority) << 20)
      | uint64_t(id);
  }

  Selection VclicRegs::makeSelection(uint32_t id) const
  {
    const InterruptCell& c = cells_[id];
    Priv cls = c.v ? Priv::VS : c.mode;
    auto dec = cfg_.decodeCtl(c.ctl);
    Selection s;
    s.id = id;
    s.privClass = cls;
    s.vmPrio = (cls == Priv::VS and vmprio_.enabled) ? vmprio_.prio[c.vsid] : 0;
    s.level = dec.level;
    s.priority = dec.priority;
    s.shv = c.shv;
    s.vsid = cls == Priv::VS ? c.vsid : 0;
    return s;
  }

  std::optional<Selection> VclicRegs::arbitrate() const
  {
    // Balanced pairwise reduction, mirroring the propagate tree of the
    // hardware. The observable result equals a linear max scan.
    std::vector<uint64_t> keys(cfg_.nIrqs);
    for (uint32_t i = 0; i < cfg_.nIrqs; ++i)
      keys[i] = lineKey(i);
    size_t n = keys.size();
    while (n > 1)
      {
        size_t half = (n + 1) / 2;
        for (size_t i = 0; i < n / 2; ++i)
          keys[i] = keys[2 * i] > keys[2 * i + 1] ? keys[2 * i] : keys[2 * i + 1];
        if (n % 2)
          keys[n / 2] = keys[n - 1];
        n = half;
      }
    if (keys.empty() or keys[0] == 0)
      return std::nullopt;
    return makeSelection(uint32_t(keys[0] & 0xfffff));
  }

  void VclicRegs::claim(uint32_t id, Cycle now)
  {
    auto sel = arbitrate();
    if (not sel or sel->id != id)
      throw ProtocolError("claim: line " + std::to_string(id)
                          + " is not the current selection");
    InterruptCell& c = cells_[id];
    if (c.trig == Trigger::EdgeRising)
      c.ip = false;
    claimCycle_[id] = now;
  }

}
