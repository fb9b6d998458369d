#include "prefixopt/policy.hpp"

#include <algorithm>
#include <sstream>

#include <fmt/format.h>

namespace prefixopt
{

namespace
{

// Arrival sums are compared with a small guard so that rounding noise is
// never mistaken for an improvement.
constexpr double tolerance = 1e-12;

int outputs_at_worst( PrefixGraph const& graph, TimingReport const& report )
{
  double const worst = report.at( report.critical_end );
  int count = 0;
  for ( int i = 1; i < graph.width(); ++i )
    count += report.at( { i, 0 } ) >= worst - tolerance;
  return count;
}

} // namespace

ToolCall GreedyBackbonePolicy::decide( DecisionContext const& ctx )
{
  if ( ctx.phase == Phase::refine )
    return CriticalPathRefinePolicy{}.decide( ctx );
  if ( ctx.backbone_cost <= ctx.target )
    return Finish1{};
  std::optional<RegroupCandidate> best;
  double best_cost = ctx.backbone_cost - tolerance;
  for ( auto const& c : ctx.candidates )
  {
    auto const next = regroup( *ctx.backbone, c.a, c.b );
    if ( !next )
      continue;
    double const cost = backbone_cost( *next, ctx.profile, ctx.model );
    if ( cost < best_cost )
    {
      best_cost = cost;
      best = c;
    }
  }
  if ( !best )
    return Finish1{};
  return Regroup{ best->a, best->b };
}

ToolCall CriticalPathRefinePolicy::decide( DecisionContext const& ctx )
{
  if ( ctx.phase == Phase::backbone )
    return Finish1{};
  auto const& graph = *ctx.graph;
  auto const& timing = *ctx.timing;
  if ( timing.slack >= 0 )
    return Finish2{ "timing met" };

  auto const& path = ctx.path->nodes;
  std::vector<ToolCall> options;

  std::vector<NodeId> by_gap;
  for ( auto it = path.rbegin(); it != path.rend(); ++it )
    if ( !it->node.is_input() && it->level > min_levels( it->node.span() ) )
      by_gap.push_back( it->node );
  std::stable_sort( by_gap.begin(), by_gap.end(), [&]( NodeId const& x, NodeId const& y ) {
    return graph.level( x ) - min_levels( x.span() ) > graph.level( y ) - min_levels( y.span() );
  } );
  for ( auto const& n : by_gap )
    options.push_back( LevelOpt{ n } );

  std::vector<std::size_t> drivers;
  for ( std::size_t i = 0; i + 1 < path.size(); ++i )
    if ( graph.fanout( path[i].node ) >= 2 )
      drivers.push_back( i );
  std::stable_sort( drivers.begin(), drivers.end(),
                    [&]( std::size_t x, std::size_t y ) { return graph.fanout( path[x].node ) > graph.fanout( path[y].node ); } );
  for ( auto i : drivers )
  {
    auto const& driver = path[i].node;
    auto const& consumer = path[i + 1].node;
    if ( graph.parents( consumer )->lp == driver )
      options.push_back( FanoutOpt{ driver, consumer } );
    if ( !driver.is_input() )
      options.push_back( NodeClone{ driver } );
  }

  bool any_applicable = false;
  int const worst_outputs = outputs_at_worst( graph, timing );
  for ( auto const& call : options )
  {
    auto const next = apply( graph, *as_refine_action( call ), &timing );
    if ( !next )
      continue;
    any_applicable = true;
    auto const after = graph_arrivals( *next, ctx.profile, ctx.model, ctx.target );
    if ( after.delay < timing.delay - tolerance ||
         ( after.delay <= timing.delay + tolerance && outputs_at_worst( *next, after ) < worst_outputs ) )
      return call;
  }
  return Finish2{ any_applicable ? "no improving tool" : "no applicable tool" };
}

ScriptedPolicy ScriptedPolicy::parse( std::string_view text )
{
  std::vector<ToolCall> calls;
  std::istringstream in{ std::string( text ) };
  std::string line;
  for ( int line_no = 1; std::getline( in, line ); ++line_no )
  {
    if ( auto hash = line.find( '#' ); hash != std::string::npos )
      line.erase( hash );
    if ( line.find_first_not_of( " \t\r" ) == std::string::npos )
      continue;
    auto call = parse_line( line );
    if ( !call )
      throw std::invalid_argument( fmt::format( "script line {}: cannot parse \"{}\"", line_no, line ) );
    calls.push_back( std::move( *call ) );
  }
  return ScriptedPolicy( std::move( calls ) );
}

ToolCall ScriptedPolicy::decide( DecisionContext const& ctx )
{
  if ( next_ < calls_.size() )
  {
    offered_ = true;
    return calls_[next_];
  }
  offered_ = false;
  if ( ctx.phase == Phase::backbone )
    return Finish1{};
  return Finish2{ "script exhausted" };
}

void ScriptedPolicy::on_result( bool applied, std::string const& )
{
  if ( applied && offered_ )
    ++next_;
  offered_ = false;
}

} // namespace prefixopt
