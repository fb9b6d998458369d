#include "prefixopt/prompts.hpp"

#include <fmt/format.h>

namespace prefixopt
{

namespace
{

std::string header( DecisionContext const& ctx, std::string_view title )
{
  auto out = fmt::format( "{}\nIteration: {}/{}\nBitwidth: {}\nTarget delay: {:.4f} ns\n", title, ctx.iteration, ctx.max_iterations, ctx.width, ctx.target );
  out += fmt::format( "Delay model: node delay d={:.4f} ns, margin lambda={:.4f} ns, fanout beta={:.4f} ns\n", ctx.model.node_delay_d,
                      ctx.model.margin_lambda, ctx.model.fanout_beta );
  return out;
}

std::string arrivals( ArrivalProfile const& profile )
{
  std::string out = "Input arrival times (ns):\n";
  for ( int i = 0; i < profile.width(); ++i )
    out += fmt::format( "({},{}) {:.4f}\n", i, i, profile[i] );
  return out;
}

std::string tools_block( Phase phase ) { return "Tools:\n" + tool_schemas( phase ).dump( 2 ) + "\n"; }

std::string feedback_block( std::string const& feedback ) { return "Tool feedback: " + ( feedback.empty() ? std::string( "none" ) : feedback ) + "\n"; }

} // namespace

std::string phase1_state( Backbone const& backbone, ArrivalProfile const& profile, DelayModel const& model )
{
  auto out = to_timed_sexpr( backbone, profile, model );
  auto const candidates = find_candidates( backbone );
  out += "\nRegroup candidates:\n";
  if ( candidates.empty() )
    out += "none\n";
  for ( std::size_t i = 0; i < candidates.size(); ++i )
    out += fmt::format( "{}. a={} b={}\n", i + 1, to_string( candidates[i].a ), to_string( candidates[i].b ) );
  return out;
}

DecisionContext make_phase1_context( Backbone const& backbone, ArrivalProfile const& profile, DelayModel const& model, double target,
                                     int iteration, int max_iterations, std::string feedback )
{
  DecisionContext ctx;
  ctx.phase = Phase::backbone;
  ctx.iteration = iteration;
  ctx.max_iterations = max_iterations;
  ctx.width = backbone.width();
  ctx.profile = profile;
  ctx.model = model;
  ctx.target = target;
  ctx.backbone = backbone;
  ctx.candidates = find_candidates( backbone );
  ctx.backbone_cost = backbone_cost( backbone, profile, model );
  ctx.feedback = std::move( feedback );
  ctx.prompt = build_phase1_prompt( ctx );
  return ctx;
}

DecisionContext make_phase2_context( PrefixGraph const& graph, ArrivalProfile const& profile, DelayModel const& model, double target,
                                     int iteration, int max_iterations, std::string feedback )
{
  DecisionContext ctx;
  ctx.phase = Phase::refine;
  ctx.iteration = iteration;
  ctx.max_iterations = max_iterations;
  ctx.width = graph.width();
  ctx.profile = profile;
  ctx.model = model;
  ctx.target = target;
  ctx.graph = graph;
  ctx.timing = graph_arrivals( graph, profile, model, target );
  ctx.path = critical_path( graph, *ctx.timing, ctx.timing->critical_start, ctx.timing->critical_end );
  ctx.feedback = std::move( feedback );
  ctx.prompt = build_phase2_prompt( ctx );
  return ctx;
}

std::string build_phase1_prompt( DecisionContext const& ctx )
{
  if ( !ctx.backbone )
    throw std::invalid_argument( "phase 1 prompt needs a backbone" );
  auto out = header( ctx, "Phase 1: backbone optimization" );
  out += arrivals( ctx.profile );
  out += fmt::format( "\nBackbone level: {}\nBackbone arrival: {:.4f} ns (slack {:.4f} ns)\n", ctx.backbone->root_level(), ctx.backbone_cost,
                      ctx.target - ctx.backbone_cost );
  out += feedback_block( ctx.feedback );
  out += "\nTimed backbone:\n";
  out += phase1_state( *ctx.backbone, ctx.profile, ctx.model );
  out += "\n" + tools_block( Phase::backbone );
  return out;
}

std::string build_phase2_prompt( DecisionContext const& ctx )
{
  if ( !ctx.graph || !ctx.timing || !ctx.path )
    throw std::invalid_argument( "phase 2 prompt needs a graph, timing and critical path" );
  auto const& g = *ctx.graph;
  auto const& t = *ctx.timing;
  auto out = header( ctx, "Phase 2: local structural refinement" );
  out += arrivals( ctx.profile );
  out += fmt::format( "\nArea (non-input nodes): {}\nDelay: {:.4f} ns\nSlack: {:.4f} ns\nLevel: {}\nMax fanout: {}\nDeficiency: {}\n", t.area, t.delay,
                      t.slack, g.depth(), g.max_fanout(), deficiency( g ) );
  out += feedback_block( ctx.feedback );
  out += "\nEPR:\n" + render_epr( g );
  out += fmt::format( "\nCritical path {} -> {}:\n", to_string( t.critical_start ), to_string( t.critical_end ) );
  out += render_critical_path( g, *ctx.path );
  out += "\n" + tools_block( Phase::refine );
  return out;
}

} // namespace prefixopt
