#pragma once

#include <string>
#include <vector>

#include "backbone.hpp"
#include "policy.hpp"
#include "refine.hpp"
#include "timing.hpp"
#include "trace.hpp"

namespace prefixopt
{

/// Rejected calls re-requested per iteration before the run aborts.
inline constexpr int retry_budget = 3;

struct Phase1Result
{
  Backbone backbone = Backbone::serial( 2 );
  RegroupTrace trace;
  int decisions = 0;
  bool finished = false;  // policy called finish_1 (as opposed to hitting K)
  bool aborted = false;
  std::string abort_reason;
  std::vector<std::string> log;
};

struct Phase2Result
{
  PrefixGraph graph{ 2 };
  std::vector<RefineAction> actions;
  int decisions = 0;
  bool finished = false;
  std::string finish_note;
  bool aborted = false;
  std::string abort_reason;
  std::vector<std::string> log;
};

/// Backbone loop from the serial chain: at most K iterations of
/// candidates -> prompt -> decide -> regroup or finish_1. Throws
/// std::invalid_argument for N < 2, K < 1 or a profile of the wrong width.
Phase1Result run_phase1( int width, ArrivalProfile const& profile, double target, int max_iterations, Policy& policy,
                         DelayModel const& model = {} );

/// Refinement loop over a complete valid graph: timing -> critical path ->
/// prompt -> decide -> refine edit or finish_2, for at most K iterations.
Phase2Result run_phase2( PrefixGraph const& graph, ArrivalProfile const& profile, double target, int max_iterations, Policy& policy,
                         DelayModel const& model = {} );

} // namespace prefixopt
