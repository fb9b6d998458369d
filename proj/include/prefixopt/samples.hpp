#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "outcome.hpp"
#include "timing.hpp"
#include "trace.hpp"

namespace prefixopt
{

/// One tool-loop step: the prompt the policy saw, an empty reasoning slot,
/// the call it made and the tool's answer.
struct SampleTurn
{
  std::string state;
  std::string think = "<think></think>";
  std::string tool;
  nlohmann::json arguments = nlohmann::json::object();
  std::string feedback;

  bool operator==( SampleTurn const& ) const = default;
};

/// A Phase I fine-tuning record. The calls replay from the serial backbone
/// of `width` bits.
struct TrainingSample
{
  std::string system;
  int width = 0;
  std::vector<SampleTurn> turns;
  /// Profile, model, target and final backbone figures; the reasoning
  /// slots are left for external filling.
  nlohmann::json metadata = nlohmann::json::object();

  bool operator==( TrainingSample const& ) const = default;
};

/// One record per trace; every regroup becomes a turn whose feedback is the
/// post-step timed backbone and candidate list, followed by a finish_1 turn.
/// Traces that do not replay are skipped and explained in `diagnostics`.
std::vector<TrainingSample> synthesize_samples( std::vector<RegroupTrace> const& traces, ArrivalProfile const& profile, DelayModel const& model,
                                                double target, std::vector<std::string>* diagnostics = nullptr );

/// Chat-style record: {"messages": [system, user, assistant(tool_calls), tool, ...], "width", "metadata"}.
nlohmann::json to_json( TrainingSample const& sample );
/// Throws std::invalid_argument on records that do not follow `to_json`.
TrainingSample sample_from_json( nlohmann::json const& j );

/// One compact JSON object per line.
std::string emit_samples( std::vector<TrainingSample> const& samples );
/// Throws std::invalid_argument naming the first bad line.
std::vector<TrainingSample> parse_samples( std::string_view text );

/// Backbone reached by the sample's regroup calls.
Outcome<Backbone> replay_sample( TrainingSample const& sample );

} // namespace prefixopt
