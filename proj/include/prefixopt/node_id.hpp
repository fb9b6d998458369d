#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace prefixopt
{

/// A prefix node covering bit range [lsb..msb]. `instance` separates clones
/// of the same range; originals are instance 0.
struct NodeId
{
  int msb = 0;
  int lsb = 0;
  int instance = 0;

  constexpr NodeId() = default;
  constexpr NodeId( int msb_, int lsb_, int instance_ = 0 ) : msb( msb_ ), lsb( lsb_ ), instance( instance_ ) {}

  constexpr bool is_input() const { return msb == lsb; }
  constexpr int span() const { return msb - lsb + 1; }
  constexpr bool same_range( NodeId const& o ) const { return msb == o.msb && lsb == o.lsb; }
  constexpr NodeId base() const { return { msb, lsb, 0 }; }

  constexpr auto operator<=>( NodeId const& ) const = default;
};

/// "(msb,lsb)" with a "#k" suffix for clones.
std::string to_string( NodeId const& id );

/// Inverse of `to_string`; tolerates surrounding whitespace.
std::optional<NodeId> parse_node_id( std::string_view text );

/// ceil(log2(span)); 0 for span 1.
constexpr int min_levels( int span )
{
  int levels = 0;
  while ( ( 1 << levels ) < span )
    ++levels;
  return levels;
}

} // namespace prefixopt
