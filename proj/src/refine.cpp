#include "prefixopt/refine.hpp"

#include <algorithm>
#include <map>
#include <regex>

#include <fmt/format.h>

namespace prefixopt
{

namespace
{

/// Lowest-level existing instance of range [lsb..msb].
std::optional<NodeId> best_instance( PrefixGraph const& graph, int msb, int lsb )
{
  std::optional<NodeId> best;
  NodeId const base{ msb, lsb };
  for ( int k = 0; k < graph.next_instance( base ); ++k )
  {
    NodeId const id{ msb, lsb, k };
    if ( graph.contains( id ) && graph.level( id ) >= 0 && ( !best || graph.level( id ) < graph.level( *best ) ) )
      best = id;
  }
  return best;
}

/// Midpoint construction of missing ranges; the upper half gets floor(span/2)
/// bits. Existing ranges are reused at their best instance.
class Builder
{
public:
  explicit Builder( PrefixGraph& graph ) : graph_( graph ) {}

  int level( int msb, int lsb )
  {
    if ( auto id = best_instance( graph_, msb, lsb ) )
      return graph_.level( *id );
    if ( auto it = planned_.find( { msb, lsb } ); it != planned_.end() )
      return it->second;
    int const k = split( msb, lsb );
    return planned_[{ msb, lsb }] = std::max( level( msb, k ), level( k - 1, lsb ) ) + 1;
  }

  NodeId build( int msb, int lsb )
  {
    if ( auto id = best_instance( graph_, msb, lsb ) )
      return *id;
    int const k = split( msb, lsb );
    auto const up = build( msb, k );
    auto const lp = build( k - 1, lsb );
    NodeId const id{ msb, lsb };
    graph_.add_node( id, up, lp );
    return id;
  }

private:
  static int split( int msb, int lsb ) { return msb - ( msb - lsb + 1 ) / 2 + 1; }

  PrefixGraph& graph_;
  std::map<std::pair<int, int>, int> planned_;
};

Rejection missing( NodeId const& id ) { return reject( to_string( id ) + " is not in the graph" ); }

NodeId replace_parent( NodeId const& p, NodeId const& from, NodeId const& to ) { return p == from ? to : p; }

} // namespace

std::string_view tool_name( RefineTool tool )
{
  switch ( tool )
  {
  case RefineTool::level_opt:
    return "level_opt";
  case RefineTool::fanout_opt:
    return "fanout_opt";
  case RefineTool::node_clone:
    return "node_clone";
  }
  return "?";
}

std::string to_string( RefineAction const& action )
{
  auto out = fmt::format( "{} {}", tool_name( action.tool ), to_string( action.target ) );
  if ( action.consumer )
    out += " " + to_string( *action.consumer );
  return out;
}

std::optional<RefineAction> parse_refine_action( std::string_view line )
{
  static std::regex const re( R"(^\s*(level_opt|fanout_opt|node_clone)\s+(\(\d+,\d+\)(?:#\d+)?)(?:\s+(\(\d+,\d+\)(?:#\d+)?))?\s*$)" );
  std::cmatch m;
  if ( !std::regex_match( line.begin(), line.end(), m, re ) )
    return std::nullopt;
  RefineAction action;
  auto const tool = m[1].str();
  action.tool = tool == "level_opt" ? RefineTool::level_opt : tool == "fanout_opt" ? RefineTool::fanout_opt : RefineTool::node_clone;
  auto target = parse_node_id( m[2].str() );
  if ( !target )
    return std::nullopt;
  action.target = *target;
  bool const wants_consumer = action.tool == RefineTool::fanout_opt;
  if ( m[3].matched != wants_consumer )
    return std::nullopt;
  if ( wants_consumer )
  {
    action.consumer = parse_node_id( m[3].str() );
    if ( !action.consumer )
      return std::nullopt;
  }
  return action;
}

Outcome<PrefixGraph> level_opt( PrefixGraph const& graph, NodeId const& target )
{
  if ( !graph.contains( target ) )
    return missing( target );
  if ( target.is_input() )
    return reject( to_string( target ) + " is an input node" );
  int const current = graph.level( target );
  if ( current <= min_levels( target.span() ) )
    return reject( fmt::format( "{} is already at the theoretical min level {}", to_string( target ), min_levels( target.span() ) ) );

  PrefixGraph out = graph;
  Builder builder( out );
  int best_split = -1, best_level = current - 1;
  for ( int k = target.msb; k > target.lsb; --k )
  {
    int const l = std::max( builder.level( target.msb, k ), builder.level( k - 1, target.lsb ) );
    if ( l < best_level )
    {
      best_level = l;
      best_split = k;
    }
  }
  if ( best_split < 0 )
    return reject( fmt::format( "no split of {} lowers its level below {}", to_string( target ), current ) );
  auto const up = builder.build( target.msb, best_split );
  auto const lp = builder.build( best_split - 1, target.lsb );
  out.add_node( target, up, lp );
  return out;
}

Outcome<PrefixGraph> fanout_opt( PrefixGraph const& graph, NodeId const& target, NodeId const& consumer )
{
  if ( !graph.contains( target ) )
    return missing( target );
  if ( !graph.contains( consumer ) )
    return missing( consumer );
  auto const cp = graph.parents( consumer );
  if ( !cp || cp->lp != target )
    return reject( fmt::format( "{} is not an ntf consumer of {}", to_string( consumer ), to_string( target ) ) );
  if ( graph.fanout( target ) < 2 )
    return reject( fmt::format( "{} has fanout {}; nothing to alleviate", to_string( target ), graph.fanout( target ) ) );

  int const i = consumer.msb, j = consumer.lsb, k = cp->up.lsb;
  struct Choice
  {
    int split;
    NodeId lp;
    std::optional<NodeId> up;       // existing upper parent
    std::optional<NodeId> bridge;   // (k-1,k'') when the upper parent is inserted
    int level;
  };
  std::optional<Choice> best;
  for ( int s = k - 1; s > j; --s )
  {
    auto const lp = best_instance( graph, s - 1, j );
    if ( !lp )
      continue;
    Choice c{ s, *lp, best_instance( graph, i, s ), std::nullopt, 0 };
    int up_level = 0;
    if ( c.up )
      up_level = graph.level( *c.up );
    else
    {
      c.bridge = best_instance( graph, k - 1, s );
      if ( !c.bridge )
        continue;
      up_level = std::max( graph.level( cp->up ), graph.level( *c.bridge ) ) + 1;
    }
    c.level = std::max( up_level, graph.level( c.lp ) ) + 1;
    auto rank = []( Choice const& x ) { return std::make_tuple( x.level, x.bridge.has_value(), -x.split ); };
    if ( !best || rank( c ) < rank( *best ) )
      best = c;
  }
  if ( !best )
    return reject( fmt::format( "no alternative split for {} avoids {}", to_string( consumer ), to_string( target ) ) );

  PrefixGraph out = graph;
  NodeId up;
  if ( best->up )
    up = *best->up;
  else
  {
    up = NodeId{ i, best->split };
    out.add_node( up, cp->up, *best->bridge );
  }
  out.add_node( consumer, up, best->lp );
  return out;
}

Outcome<PrefixGraph> node_clone( PrefixGraph const& graph, NodeId const& target, TimingReport const* report )
{
  if ( !graph.contains( target ) )
    return missing( target );
  if ( target.is_input() )
    return reject( to_string( target ) + " is an input node" );
  auto const consumers = graph.consumers( target );
  if ( consumers.size() < 2 )
    return reject( fmt::format( "{} has fanout {}; cloning needs at least 2", to_string( target ), consumers.size() ) );

  std::vector<NodeId> moved;
  if ( report )
  {
    double const mine = driver_contribution( graph, *report, target );
    for ( auto const& c : consumers )
    {
      auto const p = *graph.parents( c );
      auto const other = p.up == target ? p.lp : p.up;
      if ( mine < driver_contribution( graph, *report, other ) )
        moved.push_back( c );
    }
  }
  if ( moved.empty() || moved.size() == consumers.size() )
    moved.assign( consumers.begin() + static_cast<std::ptrdiff_t>( consumers.size() / 2 ), consumers.end() );

  PrefixGraph out = graph;
  NodeId const clone{ target.msb, target.lsb, graph.next_instance( target ) };
  auto const p = *graph.parents( target );
  out.add_node( clone, p.up, p.lp );
  for ( auto const& c : moved )
  {
    auto const cp = *graph.parents( c );
    out.add_node( c, replace_parent( cp.up, target, clone ), replace_parent( cp.lp, target, clone ) );
  }
  return out;
}

Outcome<PrefixGraph> apply( PrefixGraph const& graph, RefineAction const& action, TimingReport const* report )
{
  switch ( action.tool )
  {
  case RefineTool::level_opt:
    return level_opt( graph, action.target );
  case RefineTool::fanout_opt:
    if ( !action.consumer )
      return reject( "fanout_opt needs a consumer node" );
    return fanout_opt( graph, action.target, *action.consumer );
  case RefineTool::node_clone:
    return node_clone( graph, action.target, report );
  }
  return reject( "unknown tool" );
}

} // namespace prefixopt
