#include "prefixopt/tool_call.hpp"

#include <sstream>

#include <fmt/format.h>

namespace prefixopt
{

namespace
{

template<class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};
template<class... Ts>
overloaded( Ts... ) -> overloaded<Ts...>;

nlohmann::json node_param( std::string const& what )
{
  return { { "type", "string" }, { "pattern", R"(^\(\d+,\d+\)(#\d+)?$)" }, { "description", what } };
}

nlohmann::json function( std::string const& name, std::string const& description, nlohmann::json properties, std::vector<std::string> required )
{
  return { { "type", "function" },
           { "function",
             { { "name", name },
               { "description", description },
               { "parameters", { { "type", "object" }, { "properties", std::move( properties ) }, { "required", std::move( required ) } } } } } };
}

std::optional<NodeId> node_arg( nlohmann::json const& args, char const* key )
{
  if ( !args.is_object() || !args.contains( key ) || !args[key].is_string() )
    return std::nullopt;
  return parse_node_id( args[key].get<std::string>() );
}

} // namespace

std::string_view call_name( ToolCall const& call )
{
  return std::visit( overloaded{ []( Regroup const& ) { return std::string_view( "regroup" ); },
                                 []( Finish1 const& ) { return std::string_view( "finish_1" ); },
                                 []( LevelOpt const& ) { return std::string_view( "level_opt" ); },
                                 []( FanoutOpt const& ) { return std::string_view( "fanout_opt" ); },
                                 []( NodeClone const& ) { return std::string_view( "node_clone" ); },
                                 []( Finish2 const& ) { return std::string_view( "finish_2" ); } },
                     call );
}

bool legal_in( ToolCall const& call, Phase phase )
{
  bool const phase1 = std::holds_alternative<Regroup>( call ) || std::holds_alternative<Finish1>( call );
  return phase1 == ( phase == Phase::backbone );
}

std::optional<RefineAction> as_refine_action( ToolCall const& call )
{
  if ( auto const* c = std::get_if<LevelOpt>( &call ) )
    return RefineAction{ RefineTool::level_opt, c->target, std::nullopt };
  if ( auto const* c = std::get_if<FanoutOpt>( &call ) )
    return RefineAction{ RefineTool::fanout_opt, c->target, c->consumer };
  if ( auto const* c = std::get_if<NodeClone>( &call ) )
    return RefineAction{ RefineTool::node_clone, c->target, std::nullopt };
  return std::nullopt;
}

std::string to_line( ToolCall const& call )
{
  if ( auto const* r = std::get_if<Regroup>( &call ) )
    return fmt::format( "regroup {} {} {} {}", r->a.msb, r->a.lsb, r->b.msb, r->b.lsb );
  if ( auto action = as_refine_action( call ) )
    return to_string( *action );
  return std::string( call_name( call ) );
}

std::optional<ToolCall> parse_line( std::string_view line )
{
  std::istringstream in{ std::string( line ) };
  std::string word, extra;
  if ( !( in >> word ) )
    return std::nullopt;
  if ( word == "regroup" )
  {
    Regroup r;
    if ( !( in >> r.a.msb >> r.a.lsb >> r.b.msb >> r.b.lsb ) || ( in >> extra ) )
      return std::nullopt;
    return r;
  }
  if ( word == "finish_1" || word == "finish_2" )
  {
    if ( in >> extra )
      return std::nullopt;
    if ( word == "finish_1" )
      return Finish1{};
    return Finish2{};
  }
  auto const action = parse_refine_action( line );
  if ( !action )
    return std::nullopt;
  switch ( action->tool )
  {
  case RefineTool::level_opt:
    return LevelOpt{ action->target };
  case RefineTool::fanout_opt:
    return FanoutOpt{ action->target, *action->consumer };
  case RefineTool::node_clone:
    return NodeClone{ action->target };
  }
  return std::nullopt;
}

nlohmann::json tool_schemas( Phase phase )
{
  auto tools = nlohmann::json::array();
  if ( phase == Phase::backbone )
  {
    tools.push_back( function( "regroup", "Modify the backbone by regrouping two nodes: adds (a.msb,b.lsb) and removes (b.msb,0). (a,b) must be one of the listed candidates.",
                               { { "a", node_param( "upper node, e.g. (7,6)" ) }, { "b", node_param( "lower node, e.g. (5,4)" ) } }, { "a", "b" } ) );
    tools.push_back( function( "finish_1", "Complete phase 1 and keep the current backbone.", nlohmann::json::object(), {} ) );
  }
  else
  {
    tools.push_back( function( "level_opt", "Reduce the logic level of the target node by re-splitting it, inserting nodes as needed.",
                               { { "target", node_param( "non-input node" ) } }, { "target" } ) );
    tools.push_back( function( "fanout_opt", "Reduce the fanout of the target node: the consumer, which uses the target as its lower parent, is re-split to avoid it.",
                               { { "target", node_param( "driving node" ) }, { "consumer", node_param( "ntf consumer of the target" ) } },
                               { "target", "consumer" } ) );
    tools.push_back( function( "node_clone", "Clone a high-fanout node and move part of its consumers to the copy.",
                               { { "target", node_param( "non-input node with fanout >= 2" ) } }, { "target" } ) );
    tools.push_back( function( "finish_2", "Complete phase 2 and keep the current adder.",
                               { { "note", { { "type", "string" }, { "description", "optional reason" } } } }, {} ) );
  }
  return tools;
}

nlohmann::json call_arguments( ToolCall const& call )
{
  return std::visit( overloaded{ []( Regroup const& c ) -> nlohmann::json { return { { "a", to_string( c.a ) }, { "b", to_string( c.b ) } }; },
                                 []( Finish1 const& ) -> nlohmann::json { return nlohmann::json::object(); },
                                 []( LevelOpt const& c ) -> nlohmann::json { return { { "target", to_string( c.target ) } }; },
                                 []( FanoutOpt const& c ) -> nlohmann::json {
                                   return { { "target", to_string( c.target ) }, { "consumer", to_string( c.consumer ) } };
                                 },
                                 []( NodeClone const& c ) -> nlohmann::json { return { { "target", to_string( c.target ) } }; },
                                 []( Finish2 const& c ) -> nlohmann::json {
                                   return c.note.empty() ? nlohmann::json::object() : nlohmann::json{ { "note", c.note } };
                                 } },
                     call );
}

Outcome<ToolCall> call_from_function( std::string_view name, nlohmann::json const& arguments )
{
  auto bad = [&]( char const* key ) { return reject( fmt::format( "{}: argument \"{}\" must be a node such as \"(3,0)\"", name, key ) ); };
  if ( name == "regroup" )
  {
    auto a = node_arg( arguments, "a" ), b = node_arg( arguments, "b" );
    if ( !a )
      return bad( "a" );
    if ( !b )
      return bad( "b" );
    return ToolCall{ Regroup{ *a, *b } };
  }
  if ( name == "finish_1" )
    return ToolCall{ Finish1{} };
  if ( name == "finish_2" )
  {
    Finish2 f;
    if ( arguments.is_object() && arguments.contains( "note" ) && arguments["note"].is_string() )
      f.note = arguments["note"].get<std::string>();
    return ToolCall{ f };
  }
  if ( name == "level_opt" || name == "node_clone" )
  {
    auto t = node_arg( arguments, "target" );
    if ( !t )
      return bad( "target" );
    if ( name == "level_opt" )
      return ToolCall{ LevelOpt{ *t } };
    return ToolCall{ NodeClone{ *t } };
  }
  if ( name == "fanout_opt" )
  {
    auto t = node_arg( arguments, "target" ), c = node_arg( arguments, "consumer" );
    if ( !t )
      return bad( "target" );
    if ( !c )
      return bad( "consumer" );
    return ToolCall{ FanoutOpt{ *t, *c } };
  }
  return reject( fmt::format( "unknown tool \"{}\"", name ) );
}

} // namespace prefixopt
