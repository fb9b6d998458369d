#pragma once

#include <cstdint>
#include <string>

#include "prefix_graph.hpp"
#include "verilog.hpp"

namespace prefixopt
{

struct VerifyOptions
{
  /// Widths up to this are checked on every operand pair.
  int exhaustive_limit = 10;
  std::uint64_t random_vectors = 100000;
  std::uint64_t seed = 1;
};

struct VerifyResult
{
  bool ok = false;
  bool exhaustive = false;
  std::uint64_t vectors = 0;
  /// Violations or the first mismatching operands when !ok.
  std::string message;
};

/// Structural validation, then bit-sliced simulation against a ripple-carry
/// reference: exhaustive up to `exhaustive_limit` bits, seeded random
/// operands above.
VerifyResult verify_adder( PrefixGraph const& graph, VerifyOptions const& options = {} );

/// Same operand schedule for a netlist with ports a, b, s and cout.
VerifyResult verify_netlist( Netlist const& netlist, VerifyOptions const& options = {} );

} // namespace prefixopt
