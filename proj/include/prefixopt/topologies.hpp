#pragma once

#include "prefix_graph.hpp"

namespace prefixopt
{

/// Classic prefix structures, used as references and starting points.

/// Ripple chain: (i,0) = (i,i) o (i-1,0).
PrefixGraph serial_graph( int width );

/// Divide-and-conquer, minimum depth, fanout grows with the block size.
PrefixGraph sklansky_graph( int width );

/// Minimum depth with fanout 2; (i, i-2^l+1) at every level l.
PrefixGraph kogge_stone_graph( int width );

/// Up-sweep/down-sweep tree with 2*log2(N)-1 levels.
PrefixGraph brent_kung_graph( int width );

} // namespace prefixopt
