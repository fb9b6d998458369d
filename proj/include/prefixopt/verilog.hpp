#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prefix_graph.hpp"

namespace prefixopt
{

enum class VerilogStyle
{
  /// and/or/xor primitives straight from the group equations.
  plain,
  /// Alternating AOI21/NAND2 and OAI21/NOR2 stages. Each signal carries a
  /// polarity; a stage whose parents disagree inverts one of them first, and
  /// sums of inverted carries use xnor. A netlist-level stand-in for
  /// inverting cell libraries, not a mapped design.
  inverting
};

/// Structural Verilog-1995 module `prefix_adder_<N>` with ports
/// a[N-1:0], b[N-1:0], s[N-1:0] and cout. The inverting style also defines
/// its AOI21/OAI21 cells in the same text. Requires a complete valid graph;
/// throws std::invalid_argument otherwise.
std::string emit_verilog( PrefixGraph const& graph, VerilogStyle style = VerilogStyle::plain );

/// Gate-level interpreter for the structural subset the emitter writes:
/// scalar and ranged input/output/wire declarations, gate primitives
/// (and, or, xor, nand, nor, xnor, not, buf), positional module instances
/// and `assign x = y;`. The last module in the text is the top.
class Netlist
{
public:
  /// Throws std::invalid_argument on syntax it does not understand, unknown
  /// modules, multiply driven or undriven nets and combinational loops.
  static Netlist parse( std::string_view text );

  std::string const& top() const { return top_; }
  /// Declared width of a top-level port (1 for scalars).
  int port_width( std::string const& name ) const;

  /// Bit-sliced evaluation: inputs[name][i] holds bit i of the port for 64
  /// lanes. Returns every top-level output the same way.
  std::map<std::string, std::vector<std::uint64_t>> evaluate( std::map<std::string, std::vector<std::uint64_t>> const& inputs ) const;

  /// Flattened gate count.
  std::size_t gate_count() const { return gates_.size(); }

  enum class Op
  {
    and_,
    or_,
    xor_,
    nand_,
    nor_,
    xnor_,
    not_,
    buf_
  };
  struct Gate
  {
    Op op;
    int out;
    std::vector<int> in;
  };

private:

  std::string top_;
  std::map<std::string, std::pair<int, int>> inputs_;   // name -> (msb, lsb); scalars (-1,-1)
  std::map<std::string, std::pair<int, int>> outputs_;
  std::map<std::string, int> nets_;                      // flattened bit name -> index
  std::vector<Gate> gates_;                              // topologically ordered

  friend struct NetlistBuilder;
};

/// Lane-wise a + b through a netlist with ports a, b, s, cout.
struct NetlistSum
{
  std::vector<std::uint64_t> sum;
  std::uint64_t cout = 0;
};
NetlistSum evaluate_adder( Netlist const& netlist, std::span<std::uint64_t const> a, std::span<std::uint64_t const> b );

} // namespace prefixopt
