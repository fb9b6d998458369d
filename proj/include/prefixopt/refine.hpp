#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "outcome.hpp"
#include "prefix_graph.hpp"
#include "timing.hpp"

namespace prefixopt
{

enum class RefineTool
{
  level_opt,
  fanout_opt,
  node_clone
};

std::string_view tool_name( RefineTool tool );

struct RefineAction
{
  RefineTool tool = RefineTool::level_opt;
  NodeId target;
  std::optional<NodeId> consumer;  // fanout_opt only

  bool operator==( RefineAction const& ) const = default;
};

/// "level_opt (3,0)", "fanout_opt (1,0) (3,0)", "node_clone (2,0)".
std::string to_string( RefineAction const& action );
/// Inverse of `to_string`; nullopt when the line is not an action.
std::optional<RefineAction> parse_refine_action( std::string_view line );

/// Re-splits `target` at the split whose parents have the lowest level,
/// building missing parents by midpoint recursion over existing nodes (ties
/// go to the larger split). Rejected unless the level strictly drops.
Outcome<PrefixGraph> level_opt( PrefixGraph const& graph, NodeId const& target );

/// `consumer` stops using `target` as its lower parent: it is re-split at
/// some k'' below its current split, over an existing lower parent
/// (k''-1,lsb) and an upper parent (msb,k'') that exists or is inserted as
/// up(consumer) o (k-1,k''). Prefers the lowest resulting level, then no
/// insertion, then the larger k''.
Outcome<PrefixGraph> fanout_opt( PrefixGraph const& graph, NodeId const& target, NodeId const& consumer );

/// Copies `target` under the next free instance and moves part of its
/// consumers onto the copy. With a timing report, consumers whose arrival
/// `target` determines stay on the original; otherwise (or when that split
/// would move nobody or everybody) the copy takes the last ceil(n/2)
/// consumers in tf-then-ntf order.
Outcome<PrefixGraph> node_clone( PrefixGraph const& graph, NodeId const& target, TimingReport const* report = nullptr );

Outcome<PrefixGraph> apply( PrefixGraph const& graph, RefineAction const& action, TimingReport const* report = nullptr );

} // namespace prefixopt
