#include "prefixopt/backbone.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace prefixopt
{

namespace
{

std::optional<std::string> backbone_error( int width, std::map<NodeId, Parents> const& nodes )
{
  if ( width < 2 )
    return "backbone width must be at least 2";
  if ( nodes.size() != static_cast<std::size_t>( width - 1 ) )
    return fmt::format( "backbone has {} nodes, expected {}", nodes.size(), width - 1 );
  NodeId const root{ width - 1, 0 };
  if ( !nodes.count( root ) )
    return "backbone root " + to_string( root ) + " missing";

  auto const is_leaf = []( NodeId const& id ) { return id.is_input() && id.instance == 0; };
  for ( auto const& [id, p] : nodes )
  {
    if ( id.instance != 0 || id.msb <= id.lsb || id.lsb < 0 || id.msb >= width )
      return to_string( id ) + " is not an internal backbone node";
    if ( p.up.msb != id.msb || p.lp.lsb != id.lsb || p.lp.msb != p.up.lsb - 1 || !( p.up.lsb > id.lsb && p.up.lsb <= id.msb ) )
      return to_string( id ) + " has parents that do not split its range";
    for ( auto const& parent : { p.up, p.lp } )
      if ( !is_leaf( parent ) && !nodes.count( parent ) )
        return to_string( id ) + " references missing node " + to_string( parent );
  }

  std::size_t reached = 0;
  std::vector<NodeId> work{ root };
  while ( !work.empty() )
  {
    auto const id = work.back();
    work.pop_back();
    auto it = nodes.find( id );
    if ( it == nodes.end() )
      continue;
    ++reached;
    work.push_back( it->second.up );
    work.push_back( it->second.lp );
  }
  if ( reached != nodes.size() )
    return "backbone contains nodes outside the root cone";
  return std::nullopt;
}

} // namespace

Backbone::Backbone( int width, std::map<NodeId, Parents> nodes ) : width_( width ), nodes_( std::move( nodes ) )
{
  // Parents have strictly smaller spans, so ascending span order is topological.
  std::vector<NodeId> order;
  for ( auto const& [id, p] : nodes_ )
    order.push_back( id );
  std::stable_sort( order.begin(), order.end(), []( auto const& x, auto const& y ) { return x.span() < y.span(); } );
  for ( auto const& id : order )
  {
    auto const& p = nodes_.at( id );
    levels_[id] = std::max( level( p.up ), level( p.lp ) ) + 1;
  }
}

Backbone Backbone::serial( int width )
{
  if ( width < 2 )
    throw std::invalid_argument( fmt::format( "backbone width must be at least 2, got {}", width ) );
  std::map<NodeId, Parents> nodes;
  for ( int m = 1; m < width; ++m )
    nodes.emplace( NodeId{ m, 0 }, Parents{ { m, m }, { m - 1, 0 } } );
  return Backbone( width, std::move( nodes ) );
}

Outcome<Backbone> Backbone::from_nodes( int width, std::map<NodeId, Parents> nodes )
{
  if ( auto error = backbone_error( width, nodes ) )
    return reject( *error );
  return Backbone( width, std::move( nodes ) );
}

Outcome<Backbone> Backbone::from_graph( PrefixGraph const& graph )
{
  int const n = graph.width();
  std::map<NodeId, Parents> nodes;
  std::vector<NodeId> work{ { n - 1, 0 } };
  while ( !work.empty() )
  {
    auto const id = work.back();
    work.pop_back();
    auto const p = graph.parents( id );
    if ( !p || nodes.count( id ) )
      continue;
    nodes.emplace( id, *p );
    work.push_back( p->up );
    work.push_back( p->lp );
  }
  return from_nodes( n, std::move( nodes ) );
}

std::set<NodeId> Backbone::node_set() const
{
  std::set<NodeId> out;
  for ( auto const& [id, p] : nodes_ )
    out.insert( id );
  return out;
}

std::optional<Parents> Backbone::parents( NodeId const& id ) const
{
  auto it = nodes_.find( id );
  if ( it == nodes_.end() )
    return std::nullopt;
  return it->second;
}

int Backbone::level( NodeId const& id ) const
{
  auto it = levels_.find( id );
  return it == levels_.end() ? 0 : it->second;
}

PrefixGraph Backbone::to_graph() const
{
  PrefixGraph graph( width_ );
  for ( auto const& [id, p] : nodes_ )
    graph.set_parents( id, p );
  return graph;
}

std::string to_string( RegroupCandidate const& c )
{
  return fmt::format( "({}, {})", to_string( c.a ), to_string( c.b ) );
}

std::vector<RegroupCandidate> find_candidates( Backbone const& backbone )
{
  std::vector<RegroupCandidate> out;
  for ( int i = backbone.width() - 1; i >= 1; --i )
  {
    auto const ridge = backbone.parents( { i, 0 } );
    if ( !ridge )
      continue;
    auto const below = backbone.parents( ridge->lp );
    if ( !below )
      continue;
    out.push_back( { ridge->up, below->up } );
  }
  return out;
}

Outcome<Backbone> regroup( Backbone const& backbone, NodeId const& a, NodeId const& b )
{
  if ( b.msb != a.lsb - 1 )
    return reject( fmt::format( "b.msb ({}) must equal a.lsb-1 ({})", b.msb, a.lsb - 1 ) );
  if ( a.lsb <= 0 || b.lsb <= 0 )
    return reject( "a and b must both have lsb > 0" );
  if ( a.instance != 0 || b.instance != 0 )
    return reject( "backbone nodes have no clones" );
  NodeId const removed{ b.msb, 0 };
  NodeId const ridge{ a.msb, 0 };
  NodeId const created{ a.msb, b.lsb };
  auto const removed_parents = backbone.parents( removed );
  if ( !removed_parents )
    return reject( "node " + to_string( removed ) + " is not in the backbone" );
  if ( backbone.contains( created ) )
    return reject( "node " + to_string( created ) + " already exists" );
  auto const ridge_parents = backbone.parents( ridge );
  if ( !ridge_parents || ridge_parents->up != a )
    return reject( to_string( a ) + " is not the upper parent of " + to_string( ridge ) );
  if ( removed_parents->up != b )
    return reject( to_string( b ) + " is not the upper parent of " + to_string( removed ) );

  auto nodes = backbone.nodes();
  nodes.erase( removed );
  nodes[created] = Parents{ a, b };
  nodes[ridge] = Parents{ created, removed_parents->lp };
  return Backbone::from_nodes( backbone.width(), std::move( nodes ) );
}

std::map<NodeId, double> backbone_arrivals( Backbone const& backbone, ArrivalProfile const& profile, DelayModel const& model )
{
  if ( profile.width() != backbone.width() )
    throw std::invalid_argument( fmt::format( "arrival profile covers {} bits, backbone has {}", profile.width(), backbone.width() ) );
  std::map<NodeId, double> arrival;
  for ( int i = 0; i < backbone.width(); ++i )
    arrival[NodeId{ i, i }] = profile[i];
  std::vector<NodeId> order;
  for ( auto const& [id, p] : backbone.nodes() )
    order.push_back( id );
  std::stable_sort( order.begin(), order.end(), []( auto const& x, auto const& y ) { return x.span() < y.span(); } );
  for ( auto const& id : order )
  {
    auto const& p = backbone.nodes().at( id );
    arrival[id] = std::max( arrival.at( p.up ), arrival.at( p.lp ) ) + model.step();
  }
  return arrival;
}

double backbone_cost( Backbone const& backbone, ArrivalProfile const& profile, DelayModel const& model )
{
  return backbone_arrivals( backbone, profile, model ).at( backbone.root() );
}

namespace
{

void render_timed( Backbone const& backbone, std::map<NodeId, double> const& arrival, NodeId const& id, std::string const& indent, bool is_root,
                   bool is_last, std::string& out )
{
  auto const parents = backbone.parents( id );
  if ( !parents )
  {
    out += fmt::format( "{}input {} [arrival={:.4f}]", indent, to_string( id ), arrival.at( id ) );
    return;
  }
  out += fmt::format( "{}{} [arrival={:.4f}]{}\n", indent, to_string( id ), arrival.at( id ), is_root ? "" : " =" );
  out += indent + "group(\n";
  render_timed( backbone, arrival, parents->up, indent + "  ", false, false, out );
  out += ",\n";
  render_timed( backbone, arrival, parents->lp, indent + "  ", false, true, out );
  out += is_last ? ")" : "\n" + indent + ")";
}

} // namespace

std::string to_timed_sexpr( Backbone const& backbone, ArrivalProfile const& profile, DelayModel const& model )
{
  auto const arrival = backbone_arrivals( backbone, profile, model );
  std::string out;
  render_timed( backbone, arrival, backbone.root(), "", true, true, out );
  return out + "\n";
}

PrefixGraph complete( Backbone const& backbone )
{
  auto graph = backbone.to_graph();
  for ( int i = 1; i < backbone.width(); ++i )
  {
    if ( graph.contains( { i, 0 } ) )
      continue;
    int k = i;
    for ( auto const& [id, p] : backbone.nodes() )
      if ( id.msb == i )
        k = std::min( k, id.lsb );
    graph.add_node( { i, 0 }, { i, k }, { k - 1, 0 } );
  }
  return graph;
}

BackboneStats backbone_stats( Backbone const& backbone )
{
  int ridge = 0;
  for ( auto const& [id, p] : backbone.nodes() )
    ridge += id.lsb == 0;
  return { static_cast<int>( backbone.nodes().size() ), backbone.root_level(), ridge };
}

} // namespace prefixopt
