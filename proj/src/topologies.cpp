#include "prefixopt/topologies.hpp"

#include <stdexcept>
#include <vector>

namespace prefixopt
{

namespace
{

/// Tracks the widest node computed so far for each column.
class ColumnBuilder
{
public:
  explicit ColumnBuilder( int width ) : graph_( width )
  {
    for ( int i = 0; i < width; ++i )
      top_.push_back( { i, i } );
  }

  NodeId const& top( int column ) const { return top_[static_cast<std::size_t>( column )]; }

  /// top(i) = top(i) o top(j); requires top(j) to end right below top(i).
  void combine( int i, int j, std::vector<NodeId>& next )
  {
    auto const& hi = top( i );
    auto const& lo = top( j );
    if ( hi.lsb == 0 || lo.msb != hi.lsb - 1 )
      throw std::logic_error( "non-adjacent combine in topology builder" );
    NodeId const node{ i, lo.lsb };
    graph_.add_node( node, hi, lo );
    next[static_cast<std::size_t>( i )] = node;
  }

  std::vector<NodeId>& tops() { return top_; }
  PrefixGraph take() { return std::move( graph_ ); }

private:
  PrefixGraph graph_;
  std::vector<NodeId> top_;
};

void require_width( int width )
{
  if ( width < 1 )
    throw std::invalid_argument( "width must be positive" );
}

} // namespace

PrefixGraph serial_graph( int width )
{
  require_width( width );
  PrefixGraph graph( width );
  for ( int i = 1; i < width; ++i )
    graph.add_node( { i, 0 }, { i, i }, { i - 1, 0 } );
  return graph;
}

PrefixGraph sklansky_graph( int width )
{
  require_width( width );
  ColumnBuilder b( width );
  for ( int l = 0; ( 1 << l ) < width; ++l )
  {
    auto next = b.tops();
    for ( int i = 0; i < width; ++i )
    {
      if ( ( ( i >> l ) & 1 ) == 0 )
        continue;
      int const j = ( ( i >> l ) << l ) - 1;
      b.combine( i, j, next );
    }
    b.tops() = next;
  }
  return b.take();
}

PrefixGraph kogge_stone_graph( int width )
{
  require_width( width );
  ColumnBuilder b( width );
  for ( int dist = 1; dist < width; dist <<= 1 )
  {
    auto next = b.tops();
    for ( int i = dist; i < width; ++i )
      if ( b.top( i ).lsb > 0 )
        b.combine( i, i - dist, next );
    b.tops() = next;
  }
  return b.take();
}

PrefixGraph brent_kung_graph( int width )
{
  require_width( width );
  ColumnBuilder b( width );
  int top_level = 0;
  for ( int dist = 1; dist < width; dist <<= 1, ++top_level )
  {
    auto next = b.tops();
    for ( int i = 2 * dist - 1; i < width; i += 2 * dist )
      b.combine( i, i - dist, next );
    b.tops() = next;
  }
  for ( int l = top_level - 1; l >= 0; --l )
  {
    int const dist = 1 << l;
    auto next = b.tops();
    for ( int i = 3 * dist - 1; i < width; i += 2 * dist )
      if ( b.top( i ).lsb > 0 )
        b.combine( i, i - dist, next );
    b.tops() = next;
  }
  return b.take();
}

} // namespace prefixopt
