#include "prefixopt/samples.hpp"

#include <algorithm>
#include <sstream>

#include <fmt/format.h>

#include "prefixopt/prompts.hpp"
#include "prefixopt/tool_call.hpp"

namespace prefixopt
{

namespace
{

nlohmann::json model_json( DelayModel const& m )
{
  return { { "k", m.slope_k }, { "b", m.intercept_b }, { "d", m.node_delay_d }, { "lambda", m.margin_lambda }, { "beta", m.fanout_beta } };
}

SampleTurn turn_for( DecisionContext const& ctx, ToolCall const& call, std::string feedback )
{
  SampleTurn t;
  t.state = ctx.prompt;
  t.tool = call_name( call );
  t.arguments = call_arguments( call );
  t.feedback = std::move( feedback );
  return t;
}

} // namespace

std::vector<TrainingSample> synthesize_samples( std::vector<RegroupTrace> const& traces, ArrivalProfile const& profile, DelayModel const& model,
                                                double target, std::vector<std::string>* diagnostics )
{
  std::vector<TrainingSample> out;
  for ( std::size_t index = 0; index < traces.size(); ++index )
  {
    auto const& trace = traces[index];
    auto skip = [&]( std::string const& why ) {
      if ( diagnostics )
        diagnostics->push_back( fmt::format( "trace {}: {}", index, why ) );
    };
    if ( trace.width < 2 || trace.width != profile.width() )
    {
      skip( fmt::format( "width {} does not match the {}-bit profile", trace.width, profile.width() ) );
      continue;
    }

    TrainingSample sample;
    sample.system = system_prompt();
    sample.width = trace.width;
    int const total = static_cast<int>( trace.steps.size() ) + 1;
    auto backbone = Backbone::serial( trace.width );
    std::string feedback;
    bool valid = true;
    for ( std::size_t k = 0; k < trace.steps.size(); ++k )
    {
      auto const& step = trace.steps[k];
      auto const ctx = make_phase1_context( backbone, profile, model, target, static_cast<int>( k ) + 1, total, feedback );
      if ( std::find( ctx.candidates.begin(), ctx.candidates.end(), step ) == ctx.candidates.end() )
      {
        skip( fmt::format( "step {} {} is not a regroup candidate", k + 1, to_string( step ) ) );
        valid = false;
        break;
      }
      backbone = regroup( backbone, step.a, step.b ).value();
      feedback = phase1_state( backbone, profile, model );
      sample.turns.push_back( turn_for( ctx, Regroup{ step.a, step.b }, feedback ) );
    }
    if ( !valid )
      continue;

    auto const ctx = make_phase1_context( backbone, profile, model, target, total, total, feedback );
    double const cost = backbone_cost( backbone, profile, model );
    sample.turns.push_back( turn_for( ctx, Finish1{}, fmt::format( "phase 1 finished: backbone level {}, arrival {:.4f} ns", backbone.root_level(), cost ) ) );

    sample.metadata = { { "profile", profile.values() },
                        { "model", model_json( model ) },
                        { "target", target },
                        { "backbone_level", backbone.root_level() },
                        { "backbone_arrival", cost },
                        { "prompt_version", std::string( system_prompt_version() ) },
                        { "think", "placeholder" } };
    out.push_back( std::move( sample ) );
  }
  return out;
}

nlohmann::json to_json( TrainingSample const& sample )
{
  auto messages = nlohmann::json::array();
  messages.push_back( { { "role", "system" }, { "content", sample.system } } );
  for ( std::size_t i = 0; i < sample.turns.size(); ++i )
  {
    auto const& t = sample.turns[i];
    auto const id = fmt::format( "call_{}", i + 1 );
    messages.push_back( { { "role", "user" }, { "content", t.state } } );
    messages.push_back( { { "role", "assistant" },
                          { "content", t.think },
                          { "tool_calls", { { { "id", id }, { "type", "function" }, { "function", { { "name", t.tool }, { "arguments", t.arguments.dump() } } } } } } } );
    messages.push_back( { { "role", "tool" }, { "tool_call_id", id }, { "content", t.feedback } } );
  }
  return { { "width", sample.width }, { "messages", messages }, { "metadata", sample.metadata } };
}

TrainingSample sample_from_json( nlohmann::json const& j )
{
  try
  {
    TrainingSample s;
    s.width = j.at( "width" ).get<int>();
    s.metadata = j.value( "metadata", nlohmann::json::object() );
    auto const& messages = j.at( "messages" );
    if ( !messages.is_array() || messages.empty() || messages.size() % 3 != 1 || messages[0].at( "role" ) != "system" )
      throw std::invalid_argument( "messages must be a system message followed by user/assistant/tool triples" );
    s.system = messages[0].at( "content" ).get<std::string>();
    for ( std::size_t i = 1; i < messages.size(); i += 3 )
    {
      auto const& user = messages[i];
      auto const& assistant = messages[i + 1];
      auto const& tool = messages[i + 2];
      if ( user.at( "role" ) != "user" || assistant.at( "role" ) != "assistant" || tool.at( "role" ) != "tool" )
        throw std::invalid_argument( fmt::format( "message {} breaks the user/assistant/tool order", i ) );
      SampleTurn t;
      t.state = user.at( "content" ).get<std::string>();
      t.think = assistant.at( "content" ).get<std::string>();
      auto const& fn = assistant.at( "tool_calls" ).at( 0 ).at( "function" );
      t.tool = fn.at( "name" ).get<std::string>();
      t.arguments = nlohmann::json::parse( fn.at( "arguments" ).get<std::string>() );
      t.feedback = tool.at( "content" ).get<std::string>();
      s.turns.push_back( std::move( t ) );
    }
    return s;
  }
  catch ( nlohmann::json::exception const& e )
  {
    throw std::invalid_argument( std::string( "malformed sample: " ) + e.what() );
  }
}

std::string emit_samples( std::vector<TrainingSample> const& samples )
{
  std::string out;
  for ( auto const& s : samples )
    out += to_json( s ).dump() + "\n";
  return out;
}

std::vector<TrainingSample> parse_samples( std::string_view text )
{
  std::vector<TrainingSample> out;
  std::istringstream in{ std::string( text ) };
  std::string line;
  for ( int line_no = 1; std::getline( in, line ); ++line_no )
  {
    if ( line.find_first_not_of( " \t\r" ) == std::string::npos )
      continue;
    try
    {
      out.push_back( sample_from_json( nlohmann::json::parse( line ) ) );
    }
    catch ( std::exception const& e )
    {
      throw std::invalid_argument( fmt::format( "sample line {}: {}", line_no, e.what() ) );
    }
  }
  return out;
}

Outcome<Backbone> replay_sample( TrainingSample const& sample )
{
  if ( sample.width < 2 )
    return reject( "sample width below 2" );
  auto backbone = Backbone::serial( sample.width );
  for ( std::size_t i = 0; i < sample.turns.size(); ++i )
  {
    auto const& t = sample.turns[i];
    auto const call = call_from_function( t.tool, t.arguments );
    if ( !call )
      return reject( fmt::format( "turn {}: {}", i + 1, call.reason() ) );
    if ( std::holds_alternative<Finish1>( *call ) )
    {
      if ( i + 1 != sample.turns.size() )
        return reject( fmt::format( "turn {}: finish_1 before the last turn", i + 1 ) );
      return backbone;
    }
    auto const* r = std::get_if<Regroup>( &*call );
    if ( !r )
      return reject( fmt::format( "turn {}: {} is not a phase 1 tool", i + 1, t.tool ) );
    auto const candidates = find_candidates( backbone );
    if ( std::find( candidates.begin(), candidates.end(), RegroupCandidate{ r->a, r->b } ) == candidates.end() )
      return reject( fmt::format( "turn {}: {} is not a regroup candidate", i + 1, to_string( RegroupCandidate{ r->a, r->b } ) ) );
    backbone = regroup( backbone, r->a, r->b ).value();
  }
  return reject( "sample does not end with finish_1" );
}

} // namespace prefixopt
