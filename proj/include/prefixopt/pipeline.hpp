#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "orchestrator.hpp"
#include "samples.hpp"

namespace prefixopt
{

inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 1;
inline constexpr int exit_aborted = 2;

/// greedy, scripted:<path> or remote. Throws std::invalid_argument for an
/// unknown selector or an unreadable script.
std::unique_ptr<Policy> make_policy( RunConfig const& config );

/// Phase I from the serial backbone, completion, then Phase II, all driven
/// by one policy.
struct Synthesis
{
  Phase1Result phase1;
  std::optional<Phase2Result> phase2;
  PrefixGraph graph{ 2 };
  bool aborted = false;
  std::string abort_reason;
};
Synthesis synthesize( RunConfig const& config, ArrivalProfile const& profile, Policy& policy );

/// saturate -> perturbed extraction per seed -> dedupe -> low-deficiency
/// filter -> trace derivation -> samples. Draw i uses seed + i.
struct Datagen
{
  std::size_t generated = 0;
  std::size_t unique = 0;
  std::size_t filtered = 0;
  std::size_t kept = 0;
  std::vector<TrainingSample> samples;
  std::vector<std::string> diagnostics;
  std::string warning;
};
Datagen generate_samples( RunConfig const& config, ArrivalProfile const& profile );

/// Default eval targets: 6 points from the Sklansky delay to the serial
/// delay under `profile`.
std::vector<double> default_targets( int width, ArrivalProfile const& profile, DelayModel const& model );

/// Subcommands. Each returns exit_ok, exit_invalid (bad config, unreadable
/// input, failed verification) or exit_aborted (policy abort), writes its
/// artifacts under config.out and reports on `out` / `err`.
int cmd_synthesize( RunConfig const& config, std::ostream& out, std::ostream& err );
int cmd_datagen( RunConfig const& config, std::ostream& out, std::ostream& err );
int cmd_eval( RunConfig const& config, std::ostream& out, std::ostream& err );
/// Verilog for config.input: an EPR file or a topology name (serial,
/// sklansky, kogge-stone, brent-kung) at config.width bits.
int cmd_export( RunConfig const& config, std::ostream& out, std::ostream& err );
/// Checks config.input, an EPR file or (by .v extension) a Verilog netlist.
int cmd_verify( RunConfig const& config, std::ostream& out, std::ostream& err );

} // namespace prefixopt
