#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "remote_policy.hpp"
#include "timing.hpp"

namespace prefixopt
{

/// Everything a pipeline command needs. Loaded from a JSON file and then
/// overridden by command-line flags.
struct RunConfig
{
  int width = 16;
  /// uniform | lsb-first | random | path to a "bit, arrival" file.
  std::string profile = "uniform";
  std::uint64_t seed = 0;
  /// Upper-half arrival of the lsb-first preset; default 4*(d+lambda).
  std::optional<double> lsb_offset;
  double target = 0.0;
  int max_iterations = 64;
  /// greedy | scripted:<path> | remote
  std::string policy = "greedy";
  DelayModel model;
  std::string out = "out";
  /// plain | inverting
  std::string verilog_style = "plain";

  // datagen
  int samples = 50;
  double eps_scale = 1.0;
  int threshold = 0;

  // eval: explicit targets, or 6 spread between the Sklansky and serial delays
  std::vector<double> targets;

  // verify / export: EPR (or, for verify, Verilog) input file
  std::string input;

  std::optional<RemoteConfig> remote;
};

/// Applies flag-style overrides. k alone moves d so that k == d + lambda;
/// d or lambda alone recompute k; k together with d or lambda is taken as
/// given and left for check() to judge.
DelayModel with_overrides( DelayModel model, std::optional<double> k, std::optional<double> b, std::optional<double> d, std::optional<double> lambda,
                           std::optional<double> beta );

/// Reads the keys of RunConfig ("width", "profile", "seed", "lsb_offset",
/// "target", "max_iterations", "policy", "model": {k, b, d, lambda, beta},
/// "out", "verilog_style", "samples", "eps_scale", "threshold", "targets",
/// "input", "remote": {...}). Unknown keys are errors.
RunConfig config_from_json( nlohmann::json const& j );
nlohmann::json to_json( RunConfig const& config );

/// Throws std::invalid_argument unless 2 <= N <= 256, K >= 1, the model is
/// consistent and the selectors are known.
void check( RunConfig const& config );

/// Arrival profile named by the config. Presets are reproducible from the
/// seed: random draws from [0, (N/8)*(d+lambda)].
ArrivalProfile make_profile( RunConfig const& config );

} // namespace prefixopt
