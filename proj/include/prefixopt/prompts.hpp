#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "backbone.hpp"
#include "epr.hpp"
#include "prefix_graph.hpp"
#include "timing.hpp"
#include "tool_call.hpp"

namespace prefixopt
{

/// Versioned system prompt compiled in from assets/.
std::string_view system_prompt();
std::string_view system_prompt_version();

/// Everything a policy sees at one iteration. The structured fields and the
/// rendered `prompt` describe the same state.
struct DecisionContext
{
  Phase phase = Phase::backbone;
  int iteration = 1;  // 1-based k
  int max_iterations = 1;
  int width = 0;
  ArrivalProfile profile;
  DelayModel model;
  double target = 0.0;

  // Phase I
  std::optional<Backbone> backbone;
  std::vector<RegroupCandidate> candidates;
  double backbone_cost = 0.0;

  // Phase II
  std::optional<PrefixGraph> graph;
  std::optional<TimingReport> timing;
  std::optional<CriticalPath> path;

  /// Result of the previous call (applied or rejected), empty at the start.
  std::string feedback;
  std::string prompt;
};

DecisionContext make_phase1_context( Backbone const& backbone, ArrivalProfile const& profile, DelayModel const& model, double target,
                                     int iteration, int max_iterations, std::string feedback = {} );
DecisionContext make_phase2_context( PrefixGraph const& graph, ArrivalProfile const& profile, DelayModel const& model, double target,
                                     int iteration, int max_iterations, std::string feedback = {} );

std::string build_phase1_prompt( DecisionContext const& ctx );
std::string build_phase2_prompt( DecisionContext const& ctx );

/// Timed S-expression followed by the numbered candidate list.
std::string phase1_state( Backbone const& backbone, ArrivalProfile const& profile, DelayModel const& model );

} // namespace prefixopt
