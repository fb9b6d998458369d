#include "prefixopt/prefix_graph.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include <fmt/format.h>

namespace prefixopt
{

std::string to_string( NodeId const& id )
{
  if ( id.instance == 0 )
    return fmt::format( "({},{})", id.msb, id.lsb );
  return fmt::format( "({},{})#{}", id.msb, id.lsb, id.instance );
}

namespace
{

bool parse_int( std::string_view& text, int& out )
{
  auto const* first = text.data();
  auto const* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars( first, last, out );
  if ( ec != std::errc{} || ptr == first )
    return false;
  text.remove_prefix( static_cast<std::size_t>( ptr - first ) );
  return true;
}

bool eat( std::string_view& text, char c )
{
  if ( text.empty() || text.front() != c )
    return false;
  text.remove_prefix( 1 );
  return true;
}

std::string_view trim( std::string_view s )
{
  while ( !s.empty() && ( s.front() == ' ' || s.front() == '\t' ) )
    s.remove_prefix( 1 );
  while ( !s.empty() && ( s.back() == ' ' || s.back() == '\t' || s.back() == '\r' ) )
    s.remove_suffix( 1 );
  return s;
}

} // namespace

std::optional<NodeId> parse_node_id( std::string_view text )
{
  text = trim( text );
  NodeId id;
  if ( !eat( text, '(' ) || !parse_int( text, id.msb ) || !eat( text, ',' ) || !parse_int( text, id.lsb ) || !eat( text, ')' ) )
    return std::nullopt;
  if ( eat( text, '#' ) )
  {
    if ( !parse_int( text, id.instance ) || id.instance <= 0 )
      return std::nullopt;
  }
  if ( !text.empty() || id.lsb < 0 || id.msb < 0 )
    return std::nullopt;
  return id;
}

PrefixGraph::PrefixGraph( int width ) : width_( width )
{
  if ( width < 1 )
    throw std::invalid_argument( "prefix graph width must be positive" );
  for ( int i = 0; i < width; ++i )
    nodes_.emplace( NodeId{ i, i }, Entry{} );
  refresh();
}

PrefixGraph PrefixGraph::without_inputs( int width )
{
  PrefixGraph graph( width );
  graph.nodes_.clear();
  graph.refresh();
  return graph;
}

std::optional<Parents> PrefixGraph::parents( NodeId const& id ) const
{
  auto it = nodes_.find( id );
  if ( it == nodes_.end() )
    return std::nullopt;
  return it->second.parents;
}

int PrefixGraph::level( NodeId const& id ) const
{
  auto it = nodes_.find( id );
  return it == nodes_.end() ? -1 : it->second.level;
}

std::vector<NodeId> const& PrefixGraph::tf( NodeId const& id ) const
{
  static std::vector<NodeId> const none;
  auto it = nodes_.find( id );
  return it == nodes_.end() ? none : it->second.tf;
}

std::vector<NodeId> const& PrefixGraph::ntf( NodeId const& id ) const
{
  static std::vector<NodeId> const none;
  auto it = nodes_.find( id );
  return it == nodes_.end() ? none : it->second.ntf;
}

std::vector<NodeId> PrefixGraph::consumers( NodeId const& id ) const
{
  auto out = tf( id );
  auto const& n = ntf( id );
  out.insert( out.end(), n.begin(), n.end() );
  return out;
}

std::vector<NodeId> PrefixGraph::nodes() const
{
  std::vector<NodeId> out;
  out.reserve( nodes_.size() );
  for ( auto const& [id, entry] : nodes_ )
    out.push_back( id );
  return out;
}

std::vector<NodeId> PrefixGraph::inputs() const
{
  std::vector<NodeId> out;
  for ( auto const& [id, entry] : nodes_ )
    if ( !entry.parents )
      out.push_back( id );
  return out;
}

std::vector<NodeId> PrefixGraph::non_inputs() const
{
  std::vector<NodeId> out;
  for ( auto const& [id, entry] : nodes_ )
    if ( entry.parents )
      out.push_back( id );
  return out;
}

std::vector<int> PrefixGraph::missing_outputs() const
{
  std::vector<int> out;
  for ( int i = 1; i < width_; ++i )
    if ( !contains( { i, 0 } ) )
      out.push_back( i );
  return out;
}

int PrefixGraph::next_instance( NodeId const& id ) const
{
  int next = 0;
  for ( auto it = nodes_.lower_bound( id.base() ); it != nodes_.end() && it->first.same_range( id ); ++it )
    next = it->first.instance + 1;
  return next;
}

void PrefixGraph::add_input( int bit )
{
  nodes_[NodeId{ bit, bit }].parents.reset();
  refresh();
}

void PrefixGraph::add_node( NodeId const& id, NodeId const& up, NodeId const& lp )
{
  nodes_[id].parents = Parents{ up, lp };
  refresh();
}

void PrefixGraph::remove_node( NodeId const& id )
{
  nodes_.erase( id );
  refresh();
}

bool PrefixGraph::operator==( PrefixGraph const& other ) const
{
  if ( width_ != other.width_ || nodes_.size() != other.nodes_.size() )
    return false;
  return std::equal( nodes_.begin(), nodes_.end(), other.nodes_.begin(), []( auto const& x, auto const& y ) {
    return x.first == y.first && x.second.parents == y.second.parents;
  } );
}

void PrefixGraph::refresh()
{
  constexpr int unvisited = -2;
  constexpr int in_progress = -3;
  for ( auto& [id, entry] : nodes_ )
  {
    entry.level = unvisited;
    entry.tf.clear();
    entry.ntf.clear();
  }

  // Iterative DFS so that malformed graphs (dangling parents, cycles) get
  // level -1 instead of blowing the stack.
  std::vector<std::map<NodeId, Entry>::iterator> stack;
  for ( auto it = nodes_.begin(); it != nodes_.end(); ++it )
  {
    if ( it->second.level != unvisited )
      continue;
    stack.push_back( it );
    while ( !stack.empty() )
    {
      auto cur = stack.back();
      auto& entry = cur->second;
      if ( !entry.parents )
      {
        entry.level = 0;
        stack.pop_back();
        continue;
      }
      auto up = nodes_.find( entry.parents->up );
      auto lp = nodes_.find( entry.parents->lp );
      if ( up == nodes_.end() || lp == nodes_.end() )
      {
        entry.level = -1;
        stack.pop_back();
        continue;
      }
      if ( entry.level == unvisited )
        entry.level = in_progress;
      bool pushed = false;
      for ( auto p : { up, lp } )
      {
        if ( p->second.level == unvisited )
        {
          stack.push_back( p );
          pushed = true;
        }
      }
      if ( pushed )
        continue;
      // A parent still in progress closes a cycle; its negative level propagates as -1.
      int const lu = up->second.level;
      int const ll = lp->second.level;
      entry.level = ( lu < 0 || ll < 0 ) ? -1 : std::max( lu, ll ) + 1;
      stack.pop_back();
    }
  }

  size_ = 0;
  for ( auto& [id, entry] : nodes_ )
  {
    if ( !entry.parents )
      continue;
    ++size_;
    for ( auto const& parent : { entry.parents->up, entry.parents->lp } )
    {
      auto it = nodes_.find( parent );
      if ( it == nodes_.end() || it->first == id )
        continue;
      ( id.msb == parent.msb ? it->second.tf : it->second.ntf ).push_back( id );
    }
  }

  depth_ = 0;
  max_fanout_ = 0;
  for ( auto const& [id, entry] : nodes_ )
  {
    depth_ = std::max( depth_, entry.level );
    max_fanout_ = std::max( max_fanout_, static_cast<int>( entry.tf.size() + entry.ntf.size() ) );
  }
}

std::string ValidityReport::to_string() const
{
  std::string out;
  for ( auto const& v : violations )
    out += fmt::format( "{}: {}\n", prefixopt::to_string( v.node ), v.rule );
  return out;
}

ValidityReport validate( PrefixGraph const& graph )
{
  ValidityReport report;
  auto flag = [&]( NodeId const& id, std::string rule ) { report.violations.push_back( { id, std::move( rule ) } ); };

  int const n = graph.width();
  for ( int i = 0; i < n; ++i )
    if ( !graph.contains( { i, i } ) )
      flag( { i, i }, "missing input node" );

  for ( auto const& id : graph.nodes() )
  {
    if ( id.msb >= n || id.lsb < 0 )
      flag( id, "bit index out of range" );
    if ( id.msb < id.lsb )
      flag( id, "msb < lsb" );
    auto const parents = graph.parents( id );
    if ( !parents )
    {
      if ( !id.is_input() )
        flag( id, "node without parents is not an input" );
      else if ( id.instance != 0 )
        flag( id, "input node cannot be cloned" );
      continue;
    }
    if ( id.is_input() )
    {
      flag( id, "input node has parents" );
      continue;
    }
    auto const& [up, lp] = *parents;
    if ( up.msb != id.msb )
      flag( id, "up.msb != msb" );
    if ( lp.lsb != id.lsb )
      flag( id, "lp.lsb != lsb" );
    if ( lp.msb != up.lsb - 1 )
      flag( id, "lp.msb != up.lsb-1" );
    if ( !( up.lsb > id.lsb && up.lsb <= id.msb ) )
      flag( id, "split point outside (lsb, msb]" );
    if ( !graph.contains( up ) )
      flag( id, fmt::format( "missing up parent {}", to_string( up ) ) );
    if ( !graph.contains( lp ) )
      flag( id, fmt::format( "missing lp parent {}", to_string( lp ) ) );
    if ( graph.level( id ) < 0 && graph.contains( up ) && graph.contains( lp ) )
      flag( id, "level undefined (cycle or broken ancestor)" );
  }
  return report;
}

namespace
{

/// Nodes in an order where parents precede children, with parent indices.
struct CompiledAdder
{
  struct Op
  {
    int up;
    int lp;
  };
  int width = 0;
  std::vector<Op> ops;        // indices into signals; first `width` are inputs
  std::vector<int> carry_of;  // signal index of (i,0) for each bit i
};

CompiledAdder compile( PrefixGraph const& graph )
{
  int const n = graph.width();
  if ( auto missing = graph.missing_outputs(); !missing.empty() )
    throw std::invalid_argument( fmt::format( "incomplete prefix graph: bit {} has no output node ({},0)", missing.front(), missing.front() ) );
  for ( int i = 0; i < n; ++i )
    if ( !graph.contains( { i, i } ) )
      throw std::invalid_argument( fmt::format( "prefix graph is missing input node ({},{})", i, i ) );

  auto order = graph.non_inputs();
  for ( auto const& id : order )
    if ( graph.level( id ) < 0 )
      throw std::invalid_argument( fmt::format( "node {} has no derivable level", to_string( id ) ) );
  std::stable_sort( order.begin(), order.end(), [&]( auto const& x, auto const& y ) { return graph.level( x ) < graph.level( y ); } );

  std::map<NodeId, int> index;
  for ( int i = 0; i < n; ++i )
    index[NodeId{ i, i }] = i;
  CompiledAdder adder;
  adder.width = n;
  for ( auto const& id : order )
  {
    auto const p = *graph.parents( id );
    adder.ops.push_back( { index.at( p.up ), index.at( p.lp ) } );
    index[id] = n + static_cast<int>( adder.ops.size() ) - 1;
  }
  adder.carry_of.resize( static_cast<std::size_t>( n ) );
  for ( int i = 0; i < n; ++i )
    adder.carry_of[static_cast<std::size_t>( i )] = index.at( i == 0 ? NodeId{ 0, 0 } : NodeId{ i, 0 } );
  return adder;
}

SlicedSum run( CompiledAdder const& adder, std::span<std::uint64_t const> a, std::span<std::uint64_t const> b )
{
  auto const n = static_cast<std::size_t>( adder.width );
  std::vector<std::uint64_t> g( n + adder.ops.size() );
  std::vector<std::uint64_t> p( n + adder.ops.size() );
  for ( std::size_t i = 0; i < n; ++i )
  {
    p[i] = a[i] ^ b[i];
    g[i] = a[i] & b[i];
  }
  for ( std::size_t k = 0; k < adder.ops.size(); ++k )
  {
    auto const u = static_cast<std::size_t>( adder.ops[k].up );
    auto const l = static_cast<std::size_t>( adder.ops[k].lp );
    g[n + k] = g[u] | ( p[u] & g[l] );
    p[n + k] = p[u] & p[l];
  }
  SlicedSum out;
  out.sum.resize( n );
  out.sum[0] = p[0];
  for ( std::size_t i = 1; i < n; ++i )
    out.sum[i] = p[i] ^ g[static_cast<std::size_t>( adder.carry_of[i - 1] )];
  out.cout = g[static_cast<std::size_t>( adder.carry_of[n - 1] )];
  return out;
}

} // namespace

SlicedSum simulate_sliced( PrefixGraph const& graph, std::span<std::uint64_t const> a, std::span<std::uint64_t const> b )
{
  auto const n = static_cast<std::size_t>( graph.width() );
  if ( a.size() != n || b.size() != n )
    throw std::invalid_argument( "operand slice count must equal graph width" );
  return run( compile( graph ), a, b );
}

AddResult simulate( PrefixGraph const& graph, std::uint64_t a, std::uint64_t b )
{
  int const n = graph.width();
  if ( n > 64 )
    throw std::invalid_argument( "scalar simulate supports widths up to 64 bits" );
  std::vector<std::uint64_t> as( static_cast<std::size_t>( n ) ), bs( static_cast<std::size_t>( n ) );
  for ( int i = 0; i < n; ++i )
  {
    as[static_cast<std::size_t>( i )] = ( a >> i ) & 1u;
    bs[static_cast<std::size_t>( i )] = ( b >> i ) & 1u;
  }
  auto const sliced = simulate_sliced( graph, as, bs );
  AddResult out;
  for ( int i = 0; i < n; ++i )
    out.sum |= ( sliced.sum[static_cast<std::size_t>( i )] & 1u ) << i;
  out.cout = ( sliced.cout & 1u ) != 0;
  return out;
}

int deficiency( PrefixGraph const& graph )
{
  return static_cast<int>( graph.size() ) + graph.depth() - ( 2 * graph.width() - 2 );
}

} // namespace prefixopt
