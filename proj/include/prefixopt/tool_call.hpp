#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "node_id.hpp"
#include "outcome.hpp"
#include "refine.hpp"

namespace prefixopt
{

enum class Phase
{
  backbone = 1,
  refine = 2
};

struct Regroup
{
  NodeId a;
  NodeId b;
  bool operator==( Regroup const& ) const = default;
};
struct Finish1
{
  bool operator==( Finish1 const& ) const = default;
};
struct LevelOpt
{
  NodeId target;
  bool operator==( LevelOpt const& ) const = default;
};
struct FanoutOpt
{
  NodeId target;
  NodeId consumer;
  bool operator==( FanoutOpt const& ) const = default;
};
struct NodeClone
{
  NodeId target;
  bool operator==( NodeClone const& ) const = default;
};
struct Finish2
{
  std::string note;
  bool operator==( Finish2 const& ) const = default;
};

using ToolCall = std::variant<Regroup, Finish1, LevelOpt, FanoutOpt, NodeClone, Finish2>;

/// Function name used in schemas and action lines: regroup, finish_1,
/// level_opt, fanout_opt, node_clone, finish_2.
std::string_view call_name( ToolCall const& call );
bool legal_in( ToolCall const& call, Phase phase );

/// The refine action behind a Phase II edit call.
std::optional<RefineAction> as_refine_action( ToolCall const& call );

/// Action line: "regroup 7 6 5 4", "finish_1", "level_opt (3,0)",
/// "fanout_opt (1,0) (3,0)", "node_clone (2,0)", "finish_2".
std::string to_line( ToolCall const& call );
std::optional<ToolCall> parse_line( std::string_view line );

/// Function-calling schemas (chat-completions "tools" array) for a phase.
nlohmann::json tool_schemas( Phase phase );
nlohmann::json call_arguments( ToolCall const& call );
/// Decodes a function call; rejects unknown names and malformed arguments.
Outcome<ToolCall> call_from_function( std::string_view name, nlohmann::json const& arguments );

} // namespace prefixopt
