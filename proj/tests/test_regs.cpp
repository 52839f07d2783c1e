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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "vclic/regs.hpp"

using namespace vclic;

namespace
{

  ClicConfig smallCfg()
  {
    ClicConfig cfg;
    cfg.nIrqs = 16;
    cfg.ctlBits = 8;
    cfg.nlbits = 4;
    cfg.vsprioBits = 3;
    return cfg;
  }

  // Randomize the full register state of a VclicRegs instance.
  void randomize(VclicRegs& regs, SplitMix64& rng)
  {
    const ClicConfig& cfg = regs.config();
    for (uint32_t i = 0; i < cfg.nIrqs; ++i)
      {
        InterruptCell& c = regs.cell(i);
        c.ip = rng.nextBelow(2);
        c.ie = rng.nextBelow(2);
        c.shv = rng.nextBelow(2);
        c.trig = rng.nextBelow(2) ? Trigger::EdgeRising : Trigger::LevelHigh;
        c.mode = rng.nextBelow(2) ? Priv::M : Priv::HS;
        c.ctl = uint8_t(rng.nextBelow(256));
        c.v = rng.nextBelow(2) and c.mode != Priv::M;
        c.vsid = uint8_t(rng.nextBelow(64));
      }
    VmPrioTable& t = regs.vmPrio();
    t.enabled = cfg.vsprioBits > 0;
    for (auto& p : t.prio)
      p = uint8_t(rng.nextBelow(1ull << cfg.vsprioBits));
  }

}

TEST_CASE("decode_address: direct map arithmetic")
{
  VclicRegs regs(smallCfg());
  uint64_t stride = regs.config().regionStrideBytes;

  auto d = regs.decodeAddress(0x1000 + 4 * 7 + 1);
  REQUIRE(d.has_value());
  CHECK(d->region == DecodedAddr::Region::M);
  CHECK(d->reg == RegKind::Ie);
  CHECK(d->index == 7);

  d = regs.decodeAddress(stride * 1 + 0x1000 + 4 * 0);
  REQUIRE(d.has_value());
  CHECK(d->region == DecodedAddr::Region::HS);
  CHECK(d->reg == RegKind::Ip);
  CHECK(d->index == 0);

  // Recomputed from the map formula: region index (addr / stride) - 2,
  // byte lane 3 of line 3 is clicintctl[3].
  d = regs.decodeAddress(stride * (2 + 5) + 0x1000 + 4 * 3 + 3);
  REQUIRE(d.has_value());
  CHECK(d->region == DecodedAddr::Region::VM);
  CHECK(d->vsid == 5);
  CHECK(d->reg == RegKind::Ctl);
  CHECK(d->index == 3);

  d = regs.decodeAddress(stride * (2 + 9) + 0x2000 + 4);
  REQUIRE(d.has_value());
  CHECK(d->region == DecodedAddr::Region::VM);
  CHECK(d->vsid == 9);
  CHECK(d->reg == RegKind::V);
  CHECK(d->index == 4);

  CHECK(not regs.decodeAddress(0x0).has_value());
  CHECK(not regs.decodeAddress(0x1000 + 4 * 16).has_value());
  CHECK(not regs.decodeAddress(regs.config().apertureBytes()).has_value());
  CHECK(not regs.decodeAddress(0x5000).has_value());
}

TEST_CASE("decode_address: vsprio absent when width is zero")
{
  ClicConfig cfg = smallCfg();
  cfg.vsprioBits = 0;
  VclicRegs regs(cfg);
  CHECK(not regs.decodeAddress(0x3000).has_value());
}

TEST_CASE("config validation")
{
  ClicConfig cfg = smallCfg();
  cfg.nIrqs = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = smallCfg();
  cfg.nIrqs = 2048;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = smallCfg();
  cfg.nlbits = 9;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = smallCfg();
  cfg.ctlBits = 1;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = smallCfg();
  cfg.nIrqs = 1024;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("decode_ctl: worked examples")
{
  ClicConfig cfg = smallCfg();

  cfg.ctlBits = 8;
  cfg.nlbits = 8;
  auto d = cfg.decodeCtl(0xa0);
  CHECK(d.level == 0xa0);
  CHECK(d.priority == 0);   // zero-width priority field

  cfg.ctlBits = 4;
  cfg.nlbits = 2;
  d = cfg.decodeCtl(0b1011'0000);
  CHECK(d.level == 0b10);
  CHECK(d.priority == 0b11);

  cfg.ctlBits = 2;
  cfg.nlbits = 0;
  d = cfg.decodeCtl(0x00);
  CHECK(d.level == 255);    // single implicit level, the maximum
  CHECK(d.priority == 0);
}

TEST_CASE("decode_ctl: exhaustive against the bit-slicing oracle")
{
  for (unsigned ctlBits = 2; ctlBits <= 8; ++ctlBits)
    for (unsigned nlbits = 0; nlbits <= ctlBits; ++nlbits)
      {
        ClicConfig cfg = smallCfg();
        cfg.ctlBits = ctlBits;
        cfg.nlbits = nlbits;
        for (unsigned ctl = 0; ctl < 256; ++ctl)
          {
            auto d = cfg.decodeCtl(uint8_t(ctl));
            auto [lev, pri] = oracle::decodeCtlBits(uint8_t(ctl), ctlBits, nlbits);
            REQUIRE(d.level == lev);
            REQUIRE(d.priority == pri);
          }
      }
}

TEST_CASE("decode_ctl then re-encode is the identity on implemented bits")
{
  SplitMix64 rng(7);
  for (int i = 0; i < 2000; ++i)
    {
      ClicConfig cfg = smallCfg();
      cfg.ctlBits = 2 + unsigned(rng.nextBelow(7));
      cfg.nlbits = unsigned(rng.nextBelow(cfg.ctlBits + 1));
      uint8_t ctl = uint8_t(rng.nextBelow(256));
      auto d = cfg.decodeCtl(ctl);
      if (cfg.nlbits == 0)
        {
          // No level bits to re-encode; priority alone must round-trip.
          uint8_t re = cfg.encodeCtl(0, d.priority);
          CHECK((re & ~cfg.ctlOnesMask()) == (uint8_t(ctl | cfg.ctlOnesMask()) & ~cfg.ctlOnesMask()));
        }
      else
        {
          uint8_t re = cfg.encodeCtl(d.level, d.priority);
          CHECK((re & ~cfg.ctlOnesMask()) == (uint8_t(ctl | cfg.ctlOnesMask()) & ~cfg.ctlOnesMask()));
        }
    }
}

TEST_CASE("set_line: level tracking and edge latching")
{
  VclicRegs regs(smallCfg());
  regs.cell(0).trig = Trigger::LevelHigh;
  regs.cell(1).trig = Trigger::EdgeRising;
  regs.cell(0).ie = regs.cell(1).ie = true;

  regs.setLine(0, true, 10);
  CHECK(regs.cell(0).ip);
  CHECK(regs.lastAssertCycle(0) == 10);
  regs.setLine(0, false, 12);
  CHECK(not regs.cell(0).ip);

  regs.setLine(1, true, 20);
  regs.setLine(1, false, 21);
  CHECK(regs.cell(1).ip);          // latched past deassert
  regs.setLine(1, true, 30);       // second edge while pending: idempotent
  CHECK(regs.cell(1).ip);
  CHECK(regs.lastAssertCycle(1) == 20);

  CHECK_THROWS_AS(regs.setLine(99, true, 0), ProtocolError);
}

TEST_CASE("claim: edge clears pending, level holds, mismatch is a protocol error")
{
  VclicRegs regs(smallCfg());
  regs.cell(5).trig = Trigger::EdgeRising;
  regs.cell(5).ie = true;
  regs.cell(6).trig = Trigger::LevelHigh;
  regs.cell(6).ie = true;

  regs.setLine(5, true, 1);
  regs.setLine(5, false, 2);
  regs.setLine(6, true, 3);

  auto sel = regs.arbitrate();
  REQUIRE(sel.has_value());
  CHECK_THROWS_AS(regs.claim(sel->id == 5 ? 6 : 5, 4), ProtocolError);

  // Claim both in arbitration order.
  for (int i = 0; i < 2; ++i)
    {
      sel = regs.arbitrate();
      REQUIRE(sel.has_value());
      if (sel->id == 5)
        {
          regs.claim(5, 10);
          CHECK(not regs.cell(5).ip);
        }
      else
        {
          CHECK(sel->id == 6);
          regs.claim(6, 11);
          CHECK(regs.cell(6).ip);   // still asserted
          regs.setLine(6, false, 12);
        }
    }
  CHECK(not regs.arbitrate().has_value());

  // An edge line never comes back after claim without a new rising edge.
  regs.setLine(5, true, 20);   // wire already low, so this is a fresh edge
  CHECK(regs.cell(5).ip);
  regs.claim(5, 21);
  CHECK(not regs.arbitrate().has_value());
}

TEST_CASE("arbitrate: spec examples")
{
  ClicConfig cfg = smallCfg();
  VclicRegs regs(cfg);
  CHECK(not regs.arbitrate().has_value());

  regs.cell(5).ip = regs.cell(5).ie = true;
  auto sel = regs.arbitrate();
  REQUIRE(sel.has_value());
  CHECK(sel->id == 5);

  // {VS vm_prio=3 level=10; VS vm_prio=7 level=1; S level=2}: the S line
  // wins on privilege class.
  VclicRegs r2(cfg);
  r2.cell(0) = {true, true, false, Trigger::LevelHigh, Priv::HS,
                cfg.encodeCtl(10, 0), true, 1};
  r2.cell(1) = {true, true, false, Trigger::LevelHigh, Priv::HS,
                cfg.encodeCtl(1, 0), true, 2};
  r2.cell(2) = {true, true, false, Trigger::LevelHigh, Priv::HS,
                cfg.encodeCtl(2, 0), false, 0};
  r2.vmPrio().prio[1] = 3;
  r2.vmPrio().prio[2] = 7;
  sel = r2.arbitrate();
  REQUIRE(sel.has_value());
  CHECK(sel->id == 2);
  CHECK(sel->privClass == Priv::HS);
  CHECK(oracle::arbitrateScan(r2) == sel);

  // {VS(1, vm_prio=7, level=1), VS(2, vm_prio=3, level=200 -> top of the
  // 4-bit field)}: VM priority dominates level within the VS class.
  VclicRegs r3(cfg);
  r3.cell(0) = {true, true, false, Trigger::LevelHigh, Priv::HS,
                cfg.encodeCtl(1, 0), true, 1};
  r3.cell(1) = {true, true, false, Trigger::LevelHigh, Priv::HS,
                cfg.encodeCtl(15, 0), true, 2};
  r3.vmPrio().prio[1] = 7;
  r3.vmPrio().prio[2] = 3;
  sel = r3.arbitrate();
  REQUIRE(sel.has_value());
  CHECK(sel->id == 0);
  CHECK(sel->vsid == 1);
  CHECK(oracle::arbitrateScan(r3) == sel);
}

TEST_CASE("arbitrate: exhaustive oracle equivalence on a small geometry")
{
  // 3 lines, 2-bit ctl, nlbits 1, 2 VSIDs, 1-bit VSPRIO. Per line:
  // ip x ie x ctl(4) x {M, S, VS(0), VS(1)} = 64 states.
  ClicConfig cfg;
  cfg.nIrqs = 3;
  cfg.ctlBits = 2;
  cfg.nlbits = 1;
  cfg.vsprioBits = 1;

  auto applyLine = [&](VclicRegs& regs, uint32_t id, unsigned code) {
    InterruptCell& c = regs.cell(id);
    c.ip = code & 1;
    c.ie = code & 2;
    c.ctl = uint8_t(((code >> 2) & 3) << 6);
    unsigned cls = (code >> 4) & 3;
    c.mode = cls == 0 ? Priv::M : Priv::HS;
    c.v = cls >= 2;
    c.vsid = cls == 3 ? 1 : 0;
  };

  long checked = 0;
  for (unsigned l0 = 0; l0 < 64; ++l0)
    for (unsigned l1 = 0; l1 < 64; ++l1)
      for (unsigned l2 = 0; l2 < 64; ++l2)
        for (unsigned pcode = 0; pcode < 8; ++pcode)
          {
            VclicRegs regs(cfg);
            applyLine(regs, 0, l0);
            applyLine(regs, 1, l1);
            applyLine(regs, 2, l2);
            regs.vmPrio().enabled = pcode & 1;
            regs.vmPrio().prio[0] = (pcode >> 1) & 1;
            regs.vmPrio().prio[1] = (pcode >> 2) & 1;
            auto got = regs.arbitrate();
            auto want = oracle::arbitrateScan(regs);
            REQUIRE(got == want);
            ++checked;
          }
  CHECK(checked == 64L * 64 * 64 * 8);
}

TEST_CASE("arbitrate: randomized oracle equivalence at full width")
{
  SplitMix64 rng(0xfeed);
  for (int iter = 0; iter < 20000; ++iter)
    {
      ClicConfig cfg;
      cfg.nIrqs = 1 + unsigned(rng.nextBelow(64));
      cfg.ctlBits = 2 + unsigned(rng.nextBelow(7));
      cfg.nlbits = unsigned(rng.nextBelow(cfg.ctlBits + 1));
      cfg.vsprioBits = unsigned(rng.nextBelow(9));
      VclicRegs regs(cfg);
      randomize(regs, rng);
      REQUIRE(regs.arbitrate() == oracle::arbitrateScan(regs));
    }
}

TEST_CASE("arbitrate: vsprio neutrality when disabled")
{
  SplitMix64 rng(0xabc);
  for (int iter = 0; iter < 2000; ++iter)
    {
      VclicRegs regs(smallCfg());
      randomize(regs, rng);
      regs.vmPrio().enabled = false;
      auto base = regs.arbitrate();
      for (auto& p : regs.vmPrio().prio)
        p = uint8_t(rng.nextBelow(8));
      CHECK(regs.arbitrate() == base);
    }
}

TEST_CASE("arbitrate: raising the level of a pending line never loses to an equal-rank rival")
{
  SplitMix64 rng(0x123);
  ClicConfig cfg = smallCfg();
  for (int iter = 0; iter < 5000; ++iter)
    {
      VclicRegs regs(cfg);
      randomize(regs, rng);
      auto sel = regs.arbitrate();
      if (not sel)
        continue;
      // Pick a random pending-enabled line and raise its level by one.
      uint32_t id = uint32_t(rng.nextBelow(cfg.nIrqs));
      InterruptCell& c = regs.cell(id);
      if (not (c.ip and c.ie))
        continue;
      auto before = cfg.decodeCtl(c.ctl);
      if (before.level >= (1u << cfg.nlbits) - 1 or cfg.nlbits == 0)
        continue;
      bool wasWinner = sel->id == id;
      c.ctl = cfg.encodeCtl(uint8_t(before.level + 1), before.priority);
      auto after = regs.arbitrate();
      REQUIRE(after.has_value());
      if (wasWinner)
        {
          // May only be displaced by a strictly higher class or vm_prio.
          if (after->id != id)
            {
              bool higher = privRank(after->privClass) > privRank(sel->privClass)
                or (after->privClass == sel->privClass and after->vmPrio > sel->vmPrio);
              CHECK(higher);
            }
        }
      CHECK(after == oracle::arbitrateScan(regs));
    }
}

TEST_CASE("mmio: visibility rules for a guest region")
{
  ClicConfig cfg = smallCfg();
  VclicRegs regs(cfg);
  uint64_t stride = cfg.regionStrideBytes;

  // Line 2 delegated to VM 3, line 4 to VM 4.
  AccessContext hs{Priv::HS, 0};
  REQUIRE(regs.mmioWrite(stride + 0x1000 + 4 * 2 + 2, 1, 0x40, hs) == MmioStatus::Ok);  // S mode
  REQUIRE(regs.mmioWrite(stride + 0x2000 + 2, 1, 0x80 | 3, hs) == MmioStatus::Ok);
  REQUIRE(regs.mmioWrite(stride + 0x1000 + 4 * 4 + 2, 1, 0x40, hs) == MmioStatus::Ok);
  REQUIRE(regs.mmioWrite(stride + 0x2000 + 4, 1, 0x80 | 4, hs) == MmioStatus::Ok);
  regs.cell(2).ie = true;
  regs.cell(4).ie = true;

  AccessContext vs3{Priv::VS, 3};
  uint64_t vm3 = stride * (2 + 3);

  // Own delegated line reads its true state.
  auto r = regs.mmioRead(vm3 + 0x1000 + 4 * 2 + 1, 1, vs3);
  REQUIRE(r.ok());
  CHECK(r.value == 1);

  // Non-delegated lines read as zero.
  r = regs.mmioRead(vm3 + 0x1000 + 4 * 4 + 1, 1, vs3);
  REQUIRE(r.ok());
  CHECK(r.value == 0);

  // Another VM's region faults.
  uint64_t vm4 = stride * (2 + 4);
  CHECK(regs.mmioRead(vm4 + 0x1000, 1, vs3).status == MmioStatus::AccessFault);
  CHECK(regs.mmioWrite(vm4 + 0x1000 + 1, 1, 1, vs3) == MmioStatus::AccessFault);

  // clicintv and VSPRIO read as zero inside the VM region, and writes
  // are dropped.
  r = regs.mmioRead(vm3 + 0x2000 + 2, 1, vs3);
  REQUIRE(r.ok());
  CHECK(r.value == 0);
  CHECK(regs.mmioWrite(vm3 + 0x2000 + 2, 1, 0x80 | 9, vs3) == MmioStatus::Ok);
  CHECK(regs.cell(2).vsid == 3);
  CHECK(regs.mmioWrite(vm3 + 0x3000 + 1, 1, 5, vs3) == MmioStatus::Ok);
  CHECK(regs.vmPrio().prio[1] == 0);

  // M region is M-only; HS may reach HS and VM regions.
  CHECK(regs.mmioRead(0x1000, 1, hs).status == MmioStatus::AccessFault);
  CHECK(regs.mmioRead(vm3 + 0x1000, 1, hs).ok());
}

TEST_CASE("mmio: clicintv delegation and VSPRIO writes from privileged regions")
{
  ClicConfig cfg = smallCfg();
  VclicRegs regs(cfg);
  AccessContext m{Priv::M, 0};
  AccessContext hs{Priv::HS, 0};
  uint64_t hsBase = cfg.regionStrideBytes;

  // HS writes clicintv[12] = (v=1, vsid=9): needs an S-mode attribute
  // first, M-mode lines cannot be delegated.
  REQUIRE(regs.mmioWrite(hsBase + 0x2000 + 12, 1, 0x80 | 9, hs) == MmioStatus::Ok);
  CHECK(not regs.cell(12).v);   // dropped: line still M mode
  REQUIRE(regs.mmioWrite(hsBase + 0x1000 + 4 * 12 + 2, 1, 0x40, hs) == MmioStatus::Ok);
  REQUIRE(regs.mmioWrite(hsBase + 0x2000 + 12, 1, 0x80 | 9, hs) == MmioStatus::Ok);
  CHECK(regs.cell(12).v);
  CHECK(regs.cell(12).vsid == 9);

  // Reserved bit 6 write-ignored, read-zero.
  REQUIRE(regs.mmioWrite(hsBase + 0x2000 + 12, 1, 0xff, hs) == MmioStatus::Ok);
  auto r = regs.mmioRead(hsBase + 0x2000 + 12, 1, hs);
  REQUIRE(r.ok());
  CHECK(r.value == (0x80 | 0x3f));

  // Flipping the mode attribute back to M drops the delegation.
  REQUIRE(regs.mmioWrite(hsBase + 0x1000 + 4 * 12 + 2, 1, 0xc0, hs) == MmioStatus::Ok);
  CHECK(not regs.cell(12).v);

  // M writes VSPRIO[9] = 5.
  REQUIRE(regs.mmioWrite(0x3000 + 9, 1, 5, m) == MmioStatus::Ok);
  CHECK(regs.vmPrio().prio[9] == 5);
}

TEST_CASE("mmio: 4-byte bundle access is little-endian (ip, ie, attr, ctl)")
{
  ClicConfig cfg = smallCfg();
  VclicRegs regs(cfg);
  AccessContext m{Priv::M, 0};

  uint32_t bundle = 0;
  bundle |= 1u;                  // ip (edge lines accept the test hook)
  bundle |= 1u << 8;             // ie
  bundle |= uint32_t(0x42) << 16;  // attr: S mode, edge trigger
  bundle |= uint32_t(0xa5) << 24;  // ctl
  // First make the line edge-triggered so ip is writable.
  REQUIRE(regs.mmioWrite(0x1000 + 4 * 3 + 2, 1, 0x42, m) == MmioStatus::Ok);
  REQUIRE(regs.mmioWrite(0x1000 + 4 * 3, 4, bundle, m) == MmioStatus::Ok);
  CHECK(regs.cell(3).ip);
  CHECK(regs.cell(3).ie);
  CHECK(regs.cell(3).mode == Priv::HS);
  CHECK(regs.cell(3).trig == Trigger::EdgeRising);
  auto r = regs.mmioRead(0x1000 + 4 * 3, 4, m);
  REQUIRE(r.ok());
  CHECK(r.value == bundle);

  // Unaligned or out-of-map word accesses are unmapped.
  CHECK(regs.mmioRead(0x1000 + 2, 4, m).status == MmioStatus::UnmappedAddress);
  CHECK(regs.mmioRead(0x1000 + 4 * 15 + 4, 4, m).status == MmioStatus::UnmappedAddress);
  CHECK(regs.mmioRead(0x1000, 2, m).status == MmioStatus::UnmappedAddress);
}

TEST_CASE("mmio: pending writes ignored for level lines, honored for edge lines from privileged regions")
{
  ClicConfig cfg = smallCfg();
  VclicRegs regs(cfg);
  AccessContext m{Priv::M, 0};

  regs.cell(1).trig = Trigger::LevelHigh;
  REQUIRE(regs.mmioWrite(0x1000 + 4 * 1, 1, 1, m) == MmioStatus::Ok);
  CHECK(not regs.cell(1).ip);

  regs.cell(2).trig = Trigger::EdgeRising;
  REQUIRE(regs.mmioWrite(0x1000 + 4 * 2, 1, 1, m) == MmioStatus::Ok);
  CHECK(regs.cell(2).ip);
  REQUIRE(regs.mmioWrite(0x1000 + 4 * 2, 1, 0, m) == MmioStatus::Ok);
  CHECK(not regs.cell(2).ip);
}

// Isolation, stated as indistinguishability: two controllers that differ
// only in state invisible to VM(x) must be indistinguishable through the
// VM(x) window, and guest writes must leave the invisible state intact.
TEST_CASE("mmio: isolation property over random guest access sequences")
{
  SplitMix64 rng(0x150);
  ClicConfig cfg = smallCfg();
  uint64_t stride = cfg.regionStrideBytes;

  long ops = 0;
  for (int round = 0; round < 300; ++round)
    {
      VclicRegs a(cfg);
      randomize(a, rng);
      VclicRegs b(cfg);
      uint8_t x = uint8_t(rng.nextBelow(8));

      // b: same visible state for VM(x), different everywhere else.
      for (uint32_t i = 0; i < cfg.nIrqs; ++i)
        {
          if (a.cell(i).v and a.cell(i).vsid == x)
            b.cell(i) = a.cell(i);
          else
            {
              InterruptCell& c = b.cell(i);
              c.ip = rng.nextBelow(2);
              c.ie = rng.nextBelow(2);
              c.shv = rng.nextBelow(2);
              c.trig = rng.nextBelow(2) ? Trigger::EdgeRising : Trigger::LevelHigh;
              c.mode = rng.nextBelow(2) ? Priv::M : Priv::HS;
              c.ctl = uint8_t(rng.nextBelow(256));
              c.v = rng.nextBelow(2) and c.mode != Priv::M
                and not (rng.nextBelow(4) == 0);
              c.vsid = uint8_t(rng.nextBelow(64));
              if (c.v and c.vsid == x)
                c.vsid = uint8_t((x + 1) % 64);
            }
        }
      b.vmPrio().enabled = a.vmPrio().enabled;
      for (auto& p : b.vmPrio().prio)
        p = uint8_t(rng.nextBelow(8));

      auto snapshotInvisible = [&](const VclicRegs& r) {
        std::vector<InterruptCell> cs;
        for (uint32_t i = 0; i < cfg.nIrqs; ++i)
          if (not (r.cell(i).v and r.cell(i).vsid == x))
            cs.push_back(r.cell(i));
        return cs;
      };
      auto vmap = [&](const VclicRegs& r) {
        std::vector<std::pair<bool, uint8_t>> v;
        for (uint32_t i = 0; i < cfg.nIrqs; ++i)
          v.emplace_back(r.cell(i).v, r.cell(i).vsid);
        return v;
      };

      auto invisA = snapshotInvisible(a);
      auto mapA = vmap(a);
      auto prioA = a.vmPrio().prio;

      AccessContext vs{Priv::VS, x};
      uint64_t base = stride * (2 + x);
      for (int op = 0; op < 200; ++op)
        {
          uint64_t off = base + rng.nextBelow(0x3100);
          unsigned width = rng.nextBelow(2) ? 1 : 4;
          if (width == 4)
            off &= ~3ull;
          if (rng.nextBelow(2))
            {
              auto ra = a.mmioRead(off, width, vs);
              auto rb = b.mmioRead(off, width, vs);
              REQUIRE(ra.status == rb.status);
              REQUIRE(ra.value == rb.value);
            }
          else
            {
              uint32_t val = uint32_t(rng.next());
              auto sa = a.mmioWrite(off, width, val, vs);
              auto sb = b.mmioWrite(off, width, val, vs);
              REQUIRE(sa == sb);
            }
          ++ops;
        }

      // Invisible line state, the delegation map, and VSPRIO are intact.
      auto invisAfter = snapshotInvisible(a);
      REQUIRE(invisAfter.size() == invisA.size());
      for (size_t i = 0; i < invisA.size(); ++i)
        {
          REQUIRE(invisAfter[i].ip == invisA[i].ip);
          REQUIRE(invisAfter[i].ie == invisA[i].ie);
          REQUIRE(invisAfter[i].shv == invisA[i].shv);
          REQUIRE(invisAfter[i].trig == invisA[i].trig);
          REQUIRE(invisAfter[i].mode == invisA[i].mode);
          REQUIRE(invisAfter[i].ctl == invisA[i].ctl);
        }
      REQUIRE(vmap(a) == mapA);
      REQUIRE(a.vmPrio().prio == prioA);
    }
  CHECK(ops == 300L * 200);
}
