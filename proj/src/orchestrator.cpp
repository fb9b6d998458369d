#include "prefixopt/orchestrator.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace prefixopt
{

namespace
{

std::string illegal( ToolCall const& call, Phase phase )
{
  return fmt::format( "{} is not available in phase {}", call_name( call ), static_cast<int>( phase ) );
}

} // namespace

Phase1Result run_phase1( int width, ArrivalProfile const& profile, double target, int max_iterations, Policy& policy, DelayModel const& model )
{
  if ( width < 2 )
    throw std::invalid_argument( "bit width must be at least 2" );
  if ( max_iterations < 1 )
    throw std::invalid_argument( "max iterations must be at least 1" );
  if ( profile.width() != width )
    throw std::invalid_argument( fmt::format( "arrival profile has {} bits, expected {}", profile.width(), width ) );

  Phase1Result result;
  result.backbone = Backbone::serial( width );
  result.trace.width = width;
  std::string feedback;
  for ( int k = 1; k <= max_iterations; ++k )
  {
    auto ctx = make_phase1_context( result.backbone, profile, model, target, k, max_iterations, feedback );
    for ( int rejections = 0;; )
    {
      ToolCall call;
      try
      {
        call = policy.decide( ctx );
      }
      catch ( PolicyError const& e )
      {
        result.aborted = true;
        result.abort_reason = fmt::format( "iteration {}: policy error: {}", k, e.what() );
        return result;
      }
      ++result.decisions;
      result.log.push_back( fmt::format( "{}: {}", k, to_line( call ) ) );

      std::string problem;
      if ( !legal_in( call, Phase::backbone ) )
        problem = illegal( call, Phase::backbone );
      else if ( std::holds_alternative<Finish1>( call ) )
      {
        policy.on_result( true, "phase 1 finished" );
        result.finished = true;
        return result;
      }
      else
      {
        auto const& r = std::get<Regroup>( call );
        RegroupCandidate const c{ r.a, r.b };
        if ( std::find( ctx.candidates.begin(), ctx.candidates.end(), c ) == ctx.candidates.end() )
          problem = fmt::format( "{} is not a current regroup candidate", to_string( c ) );
        else if ( auto next = regroup( result.backbone, r.a, r.b ); !next )
          problem = next.reason();
        else
        {
          double const before = ctx.backbone_cost;
          result.backbone = std::move( next ).value();
          result.trace.steps.push_back( c );
          feedback = fmt::format( "regroup {} applied: added {}, removed {}; backbone arrival {:.4f} -> {:.4f} ns, level {}", to_string( c ),
                                  to_string( NodeId{ r.a.msb, r.b.lsb } ), to_string( NodeId{ r.b.msb, 0 } ), before,
                                  backbone_cost( result.backbone, profile, model ), result.backbone.root_level() );
          policy.on_result( true, feedback );
          break;
        }
      }

      result.log.push_back( "rejected: " + problem );
      policy.on_result( false, problem );
      if ( ++rejections >= retry_budget )
      {
        result.aborted = true;
        result.abort_reason = fmt::format( "iteration {}: {} rejected calls, last: {}", k, rejections, problem );
        return result;
      }
      ctx.feedback = "rejected: " + problem;
      ctx.prompt = build_phase1_prompt( ctx );
    }
  }
  return result;
}

Phase2Result run_phase2( PrefixGraph const& graph, ArrivalProfile const& profile, double target, int max_iterations, Policy& policy,
                         DelayModel const& model )
{
  if ( max_iterations < 1 )
    throw std::invalid_argument( "max iterations must be at least 1" );
  if ( auto const report = validate( graph ); !report.ok() )
    throw std::invalid_argument( "phase 2 needs a valid graph:\n" + report.to_string() );
  if ( !graph.is_complete() )
    throw std::invalid_argument( "phase 2 needs a complete graph" );
  if ( profile.width() != graph.width() )
    throw std::invalid_argument( fmt::format( "arrival profile has {} bits, expected {}", profile.width(), graph.width() ) );

  Phase2Result result;
  result.graph = graph;
  std::string feedback;
  for ( int k = 1; k <= max_iterations; ++k )
  {
    auto ctx = make_phase2_context( result.graph, profile, model, target, k, max_iterations, feedback );
    for ( int rejections = 0;; )
    {
      ToolCall call;
      try
      {
        call = policy.decide( ctx );
      }
      catch ( PolicyError const& e )
      {
        result.aborted = true;
        result.abort_reason = fmt::format( "iteration {}: policy error: {}", k, e.what() );
        return result;
      }
      ++result.decisions;
      result.log.push_back( fmt::format( "{}: {}", k, to_line( call ) ) );

      std::string problem;
      if ( !legal_in( call, Phase::refine ) )
        problem = illegal( call, Phase::refine );
      else if ( auto const* f = std::get_if<Finish2>( &call ) )
      {
        policy.on_result( true, "phase 2 finished" );
        result.finished = true;
        result.finish_note = f->note;
        return result;
      }
      else
      {
        auto const action = *as_refine_action( call );
        auto next = apply( result.graph, action, &*ctx.timing );
        if ( !next )
          problem = next.reason();
        else
        {
          auto const after = graph_arrivals( *next, profile, model, target );
          int const level_before = result.graph.contains( action.target ) ? result.graph.level( action.target ) : -1;
          feedback = fmt::format( "{} applied: target level {} -> {}, target fanout {} -> {}, delay {:.4f} -> {:.4f} ns, area {} -> {}",
                                  to_string( action ), level_before, next->level( action.target ), result.graph.fanout( action.target ),
                                  next->fanout( action.target ), ctx.timing->delay, after.delay, ctx.timing->area, after.area );
          result.graph = std::move( next ).value();
          result.actions.push_back( action );
          policy.on_result( true, feedback );
          break;
        }
      }

      result.log.push_back( "rejected: " + problem );
      policy.on_result( false, problem );
      if ( ++rejections >= retry_budget )
      {
        result.aborted = true;
        result.abort_reason = fmt::format( "iteration {}: {} rejected calls, last: {}", k, rejections, problem );
        return result;
      }
      ctx.feedback = "rejected: " + problem;
      ctx.prompt = build_phase2_prompt( ctx );
    }
  }
  return result;
}

} // namespace prefixopt
