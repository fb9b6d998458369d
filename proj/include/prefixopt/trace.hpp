#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "backbone.hpp"
#include "backbone_expr.hpp"
#include "outcome.hpp"

namespace prefixopt
{

/// Regroup steps that turn the serial backbone into some target backbone.
struct RegroupTrace
{
  int width = 0;
  std::vector<RegroupCandidate> steps;

  bool operator==( RegroupTrace const& ) const = default;
};

/// Replays `trace` from the serial backbone; rejects at the first step that
/// is not a regroup candidate of the current backbone.
Outcome<Backbone> replay( RegroupTrace const& trace );

/// Rewrite sequence from the serial backbone to `target`. Each step is the
/// lowest-column candidate that creates a node of `target` and removes a
/// node outside it, so the trace length is the number of target nodes with
/// lsb > 0. Throws std::logic_error if no such candidate exists.
RegroupTrace derive_trace( Backbone const& target );
RegroupTrace derive_trace( BackboneExpr const& target );

/// One "regroup a.msb a.lsb b.msb b.lsb" line per step.
std::string to_text( RegroupTrace const& trace );
/// Inverse of `to_text`; blank lines and '#' comments are skipped.
RegroupTrace parse_trace( int width, std::string_view text );

/// Level of the completed adder minus the backbone level, L - L_B.
int level_increase( Backbone const& backbone );

/// Keeps candidates whose completed adder adds at most `threshold` levels
/// over the backbone level.
std::vector<BackboneExpr> filter_low_deficiency( std::vector<BackboneExpr> const& candidates, int threshold = 0 );

} // namespace prefixopt
