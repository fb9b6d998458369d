#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "prefix_graph.hpp"
#include "timing.hpp"

namespace prefixopt
{

/// Enhanced prefix representation: global header, then input and non-input
/// node lists with level, parents and tf/ntf fanouts. Inputs ascend by msb;
/// non-inputs descend by msb, then ascend by lsb and instance.
std::string render_epr( PrefixGraph const& graph );

class EprParseError : public std::runtime_error
{
public:
  EprParseError( int line, std::string const& what );
  int line() const { return line_; }

private:
  int line_;
};

/// Inverse of `render_epr`. For graphs that validate, declared levels,
/// fanout lists and header counts must agree with the structure.
PrefixGraph parse_epr( std::string_view text );

struct PathEntry
{
  NodeId node;
  int level = 0;
};

struct CriticalPath
{
  std::vector<PathEntry> nodes;  // start input first, end node last
  int theoretical_min = 0;       // ceil(log2(span(end)))
  int actual = 0;                // level(end)
};

/// Latest-arrival parent chain from `end` back to `start`, keeping only
/// parents that descend from `start`. Throws std::invalid_argument when
/// `start` is not an ancestor of `end` or is not an input.
CriticalPath critical_path( PrefixGraph const& graph, TimingReport const& report, NodeId const& start, NodeId const& end );

/// "Lvl k: ..." lines followed by the level-efficiency line.
std::string render_critical_path( PrefixGraph const& graph, CriticalPath const& path );

} // namespace prefixopt
