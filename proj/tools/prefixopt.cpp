// Command-line front end: synthesize, datagen, eval, export, verify.

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "prefixopt/pipeline.hpp"

using namespace prefixopt;

namespace
{

struct Flags
{
  std::string config;
  std::optional<int> bits;
  std::optional<std::string> profile;
  std::optional<std::uint64_t> seed;
  std::optional<double> lsb_offset;
  std::optional<double> target;
  std::optional<int> max_iters;
  std::optional<std::string> policy;
  std::optional<double> k, b, d, lambda, beta;
  std::optional<std::string> out;
  std::optional<std::string> style;
  std::optional<int> samples;
  std::optional<double> eps_scale;
  std::optional<int> threshold;
  std::vector<double> targets;
  std::string input;
};

void add_common( CLI::App* cmd, Flags& f )
{
  cmd->add_option( "--config", f.config, "JSON run configuration; flags override it" );
  cmd->add_option( "--bits", f.bits, "adder width N (2..256)" );
  cmd->add_option( "--profile", f.profile, "uniform | lsb-first | random | path to a 'bit, arrival' file" );
  cmd->add_option( "--seed", f.seed, "seed for the random profile, datagen draws and verify vectors" );
  cmd->add_option( "--lsb-offset", f.lsb_offset, "upper-half arrival for lsb-first, ns (default 4*(d+lambda))" );
  cmd->add_option( "--target", f.target, "target delay T, ns" );
  cmd->add_option( "--max-iters", f.max_iters, "iteration budget K per phase" );
  cmd->add_option( "--policy", f.policy, "greedy | scripted:<path> | remote" );
  cmd->add_option( "--model-k", f.k, "delay slope k (ns per node)" );
  cmd->add_option( "--model-b", f.b, "delay intercept b (ns)" );
  cmd->add_option( "--model-d", f.d, "node delay d (ns)" );
  cmd->add_option( "--model-lambda", f.lambda, "per-node margin lambda (ns)" );
  cmd->add_option( "--model-beta", f.beta, "extra delay per additional fanout (ns)" );
  cmd->add_option( "--out", f.out, "output directory" );
  cmd->add_option( "--style", f.style, "Verilog style: plain | inverting" );
}

RunConfig resolve( Flags const& f )
{
  RunConfig c;
  if ( !f.config.empty() )
  {
    std::ifstream in( f.config );
    if ( !in )
      throw std::invalid_argument( "cannot read config " + f.config );
    nlohmann::json j;
    try
    {
      in >> j;
    }
    catch ( nlohmann::json::exception const& e )
    {
      throw std::invalid_argument( f.config + ": " + e.what() );
    }
    c = config_from_json( j );
  }
  if ( f.bits )
    c.width = *f.bits;
  if ( f.profile )
    c.profile = *f.profile;
  if ( f.seed )
    c.seed = *f.seed;
  if ( f.lsb_offset )
    c.lsb_offset = f.lsb_offset;
  if ( f.target )
    c.target = *f.target;
  if ( f.max_iters )
    c.max_iterations = *f.max_iters;
  if ( f.policy )
    c.policy = *f.policy;
  if ( f.k || f.b || f.d || f.lambda || f.beta )
    c.model = with_overrides( c.model, f.k, f.b, f.d, f.lambda, f.beta );
  if ( f.out )
    c.out = *f.out;
  if ( f.style )
    c.verilog_style = *f.style;
  if ( f.samples )
    c.samples = *f.samples;
  if ( f.eps_scale )
    c.eps_scale = *f.eps_scale;
  if ( f.threshold )
    c.threshold = *f.threshold;
  if ( !f.targets.empty() )
    c.targets = f.targets;
  if ( !f.input.empty() )
    c.input = f.input;
  return c;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "Two-phase prefix adder synthesis: backbone regrouping, completion and local refinement." };
  app.require_subcommand( 1 );
  Flags f;

  auto* synth = app.add_subcommand( "synthesize", "run both phases and write EPR, Verilog, trace and report" );
  add_common( synth, f );

  auto* datagen = app.add_subcommand( "datagen", "generate regroup-trace training samples (JSONL)" );
  add_common( datagen, f );
  datagen->add_option( "--samples", f.samples, "number of perturbed extractions" );
  datagen->add_option( "--eps-scale", f.eps_scale, "noise scale as a fraction of d+lambda" );
  datagen->add_option( "--threshold", f.threshold, "largest accepted level increase after completion" );

  auto* eval = app.add_subcommand( "eval", "sweep targets and write the area-delay report" );
  add_common( eval, f );
  eval->add_option( "--targets", f.targets, "target delays, ns (default: 6 from Sklansky to serial)" );

  auto* exporter = app.add_subcommand( "export", "write structural Verilog for an EPR file or a named topology" );
  add_common( exporter, f );
  exporter->add_option( "input", f.input, "EPR file, or serial | sklansky | kogge-stone | brent-kung" )->required();

  auto* verify = app.add_subcommand( "verify", "check an EPR file or Verilog netlist against integer addition" );
  add_common( verify, f );
  verify->add_option( "input", f.input, "EPR file or .v netlist" )->required();

  try
  {
    app.parse( argc, argv );
  }
  catch ( CLI::ParseError const& e )
  {
    int const code = app.exit( e );
    return code == 0 ? 0 : exit_invalid;
  }

  RunConfig config;
  try
  {
    config = resolve( f );
  }
  catch ( std::exception const& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return exit_invalid;
  }

  if ( *synth )
    return cmd_synthesize( config, std::cout, std::cerr );
  if ( *datagen )
    return cmd_datagen( config, std::cout, std::cerr );
  if ( *eval )
    return cmd_eval( config, std::cout, std::cerr );
  if ( *exporter )
    return cmd_export( config, std::cout, std::cerr );
  return cmd_verify( config, std::cout, std::cerr );
}
