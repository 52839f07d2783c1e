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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vclic
{

  using Cycle = uint64_t;

  /// Privilege class of an execution context or of an interrupt target.
  /// The numeric value is the rank used by arbitration and trap decisions:
  /// VS < HS < M.
  enum class Priv : uint8_t { VS = 0, HS = 1, M = 2 };

  inline int privRank(Priv p)
  { return static_cast<int>(p); }

  inline const char* privName(Priv p)
  {
    switch (p)
      {
      case Priv::VS: return "VS";
      case Priv::HS: return "HS";
      case Priv::M:  return "M";
      }
    return "?";
  }

  /// A handshake was driven out of protocol (claim of a non-selected line,
  /// trap exit on an empty stack, ...). Signals a harness bug, not a
  /// modeled hardware condition.
  class ProtocolError : public std::logic_error
  {
  public:
    explicit ProtocolError(const std::string& what)
      : std::logic_error(what)
    { }
  };

  /// A scenario or configuration was rejected. The message carries the
  /// offending field path.
  class ValidationError : public std::runtime_error
  {
  public:
    explicit ValidationError(const std::string& what)
      : std::runtime_error(what)
    { }
  };

  /// Small deterministic generator (splitmix64). We roll our own draws so
  /// that traces are bit-identical across standard libraries and platforms.
  class SplitMix64
  {
  public:
    explicit SplitMix64(uint64_t seed)
      : x_(seed)
    { }

    uint64_t next()
    {
      x_ += 0x9e3779b97f4a7c15ull;
      uint64_t z = x_;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double nextUnit()
    { return double(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Modulo bias is irrelevant here; what
    /// matters is that exactly one raw draw is consumed per call.
    uint64_t nextBelow(uint64_t n)
    { return n ? next() % n : 0; }

  private:
    uint64_t x_ = 0;
  };

}
