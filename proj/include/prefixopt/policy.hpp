#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "prompts.hpp"
#include "tool_call.hpp"

namespace prefixopt
{

/// Transport or protocol failure inside a policy; the orchestrator aborts.
class PolicyError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Chooses the next tool call. The orchestrator reports back whether the
/// call was applied, with the feedback text shown in the next prompt.
class Policy
{
public:
  virtual ~Policy() = default;
  virtual ToolCall decide( DecisionContext const& ctx ) = 0;
  virtual void on_result( bool /*applied*/, std::string const& /*feedback*/ ) {}
};

/// Phase I: the candidate whose regroup gives the lowest backbone arrival,
/// first in candidate order on ties; finish_1 once the arrival meets the
/// target or no candidate strictly improves it.
/// Phase II: delegates to CriticalPathRefinePolicy.
class GreedyBackbonePolicy : public Policy
{
public:
  ToolCall decide( DecisionContext const& ctx ) override;
};

/// Phase II: finish_2 when slack >= 0. Otherwise tries, in order, level_opt
/// on critical nodes by decreasing (level - theoretical min), then
/// fanout_opt/node_clone on critical drivers by decreasing fanout, and
/// returns the first edit that lowers the delay, or keeps it while leaving
/// fewer outputs at the worst arrival. finish_2 "no applicable tool" when
/// none does.
class CriticalPathRefinePolicy : public Policy
{
public:
  ToolCall decide( DecisionContext const& ctx ) override;
};

/// Replays action lines in order. A call is consumed only once applied, so
/// a rejected line is offered again. An exhausted script answers finish.
class ScriptedPolicy : public Policy
{
public:
  explicit ScriptedPolicy( std::vector<ToolCall> calls ) : calls_( std::move( calls ) ) {}
  /// One action line per line; blank lines and '#' comments are skipped.
  /// Throws std::invalid_argument naming the first bad line.
  static ScriptedPolicy parse( std::string_view text );

  ToolCall decide( DecisionContext const& ctx ) override;
  void on_result( bool applied, std::string const& feedback ) override;

  std::size_t position() const { return next_; }

private:
  std::vector<ToolCall> calls_;
  std::size_t next_ = 0;
  bool offered_ = false;
};

} // namespace prefixopt
