#include "prefixopt/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "prefixopt/egraph.hpp"
#include "prefixopt/epr.hpp"
#include "prefixopt/report.hpp"
#include "prefixopt/topologies.hpp"
#include "prefixopt/verify.hpp"

namespace prefixopt
{

namespace
{

namespace fs = std::filesystem;

std::string read_file( std::string const& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
    throw std::invalid_argument( fmt::format( "cannot read {}", path ) );
  std::stringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file( fs::path const& path, std::string const& text )
{
  std::ofstream out( path, std::ios::binary );
  if ( !out || !( out << text ) )
    throw std::runtime_error( fmt::format( "cannot write {}", path.string() ) );
}

fs::path prepare( RunConfig const& config )
{
  fs::path dir( config.out );
  fs::create_directories( dir );
  return dir;
}

std::string join_lines( std::vector<std::string> const& lines )
{
  std::string out;
  for ( auto const& l : lines )
    out += l + "\n";
  return out;
}

VerilogStyle style_of( RunConfig const& config ) { return config.verilog_style == "inverting" ? VerilogStyle::inverting : VerilogStyle::plain; }

std::string describe( VerifyResult const& v )
{
  if ( !v.ok )
    return "FAILED: " + v.message;
  return fmt::format( "ok ({} {} vectors)", v.vectors, v.exhaustive ? "exhaustive" : "random" );
}

/// Runs `body`, mapping configuration, input and I/O errors to exit_invalid.
template<typename Body>
int guarded( std::ostream& err, Body&& body )
{
  try
  {
    return body();
  }
  catch ( std::exception const& e )
  {
    fmt::print( err, "error: {}\n", e.what() );
    return exit_invalid;
  }
}

} // namespace

std::unique_ptr<Policy> make_policy( RunConfig const& config )
{
  if ( config.policy == "greedy" )
    return std::make_unique<GreedyBackbonePolicy>();
  if ( config.policy.rfind( "scripted:", 0 ) == 0 )
    return std::make_unique<ScriptedPolicy>( ScriptedPolicy::parse( read_file( config.policy.substr( 9 ) ) ) );
  if ( config.policy == "remote" )
  {
    if ( !config.remote )
      throw std::invalid_argument( "the remote policy needs a \"remote\" section in the config file" );
    return std::make_unique<RemoteLlmPolicy>( *config.remote );
  }
  throw std::invalid_argument( fmt::format( "unknown policy \"{}\"", config.policy ) );
}

Synthesis synthesize( RunConfig const& config, ArrivalProfile const& profile, Policy& policy )
{
  Synthesis s;
  s.phase1 = run_phase1( config.width, profile, config.target, config.max_iterations, policy, config.model );
  if ( s.phase1.aborted )
  {
    s.aborted = true;
    s.abort_reason = "phase 1: " + s.phase1.abort_reason;
    s.graph = complete( s.phase1.backbone );
    return s;
  }
  auto const completed = complete( s.phase1.backbone );
  s.phase2 = run_phase2( completed, profile, config.target, config.max_iterations, policy, config.model );
  s.graph = s.phase2->graph;
  if ( s.phase2->aborted )
  {
    s.aborted = true;
    s.abort_reason = "phase 2: " + s.phase2->abort_reason;
  }
  return s;
}

Datagen generate_samples( RunConfig const& config, ArrivalProfile const& profile )
{
  Datagen d;
  if ( config.samples == 0 )
    return d;
  auto const sat = saturate( BackboneExpr::serial( config.width ) );
  std::vector<BackboneExpr> unique;
  std::set<std::string> seen;
  for ( int i = 0; i < config.samples; ++i )
  {
    auto const x = extract_perturbed( sat, profile, config.model, config.seed + static_cast<std::uint64_t>( i ), config.eps_scale );
    if ( d.warning.empty() )
      d.warning = x.warning;
    ++d.generated;
    if ( seen.insert( x.expr.to_string() ).second )
      unique.push_back( x.expr );
  }
  d.unique = unique.size();
  auto const kept = filter_low_deficiency( unique, config.threshold );
  d.filtered = unique.size() - kept.size();
  std::vector<RegroupTrace> traces;
  for ( auto const& e : kept )
    traces.push_back( derive_trace( e ) );
  d.samples = synthesize_samples( traces, profile, config.model, config.target, &d.diagnostics );
  d.kept = d.samples.size();
  return d;
}

std::vector<double> default_targets( int width, ArrivalProfile const& profile, DelayModel const& model )
{
  double const lo = graph_arrivals( sklansky_graph( width ), profile, model ).delay;
  double const hi = graph_arrivals( serial_graph( width ), profile, model ).delay;
  std::vector<double> t;
  for ( int i = 0; i < 6; ++i )
    t.push_back( lo + ( hi - lo ) * i / 5.0 );
  return t;
}

int cmd_synthesize( RunConfig const& config, std::ostream& out, std::ostream& err )
{
  return guarded( err, [&] {
    check( config );
    auto const profile = make_profile( config );
    auto policy = make_policy( config );
    auto const s = synthesize( config, profile, *policy );
    auto const dir = prepare( config );

    write_file( dir / "trace.txt", to_text( s.phase1.trace ) );
    std::string actions;
    std::vector<std::string> log = s.phase1.log;
    if ( s.phase2 )
    {
      for ( auto const& a : s.phase2->actions )
        actions += to_string( a ) + "\n";
      log.insert( log.end(), s.phase2->log.begin(), s.phase2->log.end() );
    }
    write_file( dir / "actions.txt", actions );
    write_file( dir / "log.txt", join_lines( log ) );

    auto const& b = s.phase1.backbone;
    fmt::print( out, "phase 1: {} regroups, backbone level {}, arrival {:.4f} ns{}\n", s.phase1.trace.steps.size(), b.root_level(),
                backbone_cost( b, profile, config.model ), s.phase1.finished ? "" : " (iteration limit)" );
    if ( s.aborted )
    {
      fmt::print( err, "aborted: {}\n", s.abort_reason );
      fmt::print( out, "partial trace written to {}\n", ( dir / "trace.txt" ).string() );
      return exit_aborted;
    }

    auto const timing = graph_arrivals( s.graph, profile, config.model, config.target );
    auto const before = graph_arrivals( complete( b ), profile, config.model, config.target );
    fmt::print( out, "phase 2: {} edits, delay {:.4f} -> {:.4f} ns, area {} -> {}, slack {:.4f} ns{}\n", s.phase2->actions.size(), before.delay,
                timing.delay, before.area, timing.area, timing.slack, s.phase2->finished ? ", " + s.phase2->finish_note : " (iteration limit)" );

    auto const verdict = verify_adder( s.graph );
    fmt::print( out, "verify: {}\n", describe( verdict ) );
    if ( !verdict.ok )
      return exit_invalid;

    write_file( dir / "design.epr", render_epr( s.graph ) );
    write_file( dir / "design.v", emit_verilog( s.graph, style_of( config ) ) );
    write_file( dir / "report.csv", emit_report( { make_row( s.graph, timing ) } ) );
    fmt::print( out, "wrote {}\n", dir.string() );
    return exit_ok;
  } );
}

int cmd_datagen( RunConfig const& config, std::ostream& out, std::ostream& err )
{
  return guarded( err, [&] {
    check( config );
    auto const profile = make_profile( config );
    auto const d = generate_samples( config, profile );
    for ( auto const& line : d.diagnostics )
      fmt::print( err, "skipped {}\n", line );
    if ( !d.warning.empty() )
      fmt::print( err, "warning: {}\n", d.warning );
    auto const dir = prepare( config );
    write_file( dir / "samples.jsonl", emit_samples( d.samples ) );
    fmt::print( out, "generated {}, unique {}, filtered {}, kept {}\n", d.generated, d.unique, d.filtered, d.kept );
    fmt::print( out, "wrote {}\n", ( dir / "samples.jsonl" ).string() );
    return exit_ok;
  } );
}

int cmd_eval( RunConfig const& config, std::ostream& out, std::ostream& err )
{
  return guarded( err, [&] {
    check( config );
    auto const profile = make_profile( config );
    auto const targets = config.targets.empty() ? default_targets( config.width, profile, config.model ) : config.targets;
    std::string abort;
    auto const rows = pareto_sweep(
        [&]( double target ) {
          auto run = config;
          run.target = target;
          auto policy = make_policy( run );
          auto const s = synthesize( run, profile, *policy );
          if ( s.aborted && abort.empty() )
            abort = fmt::format( "target {:.4f}: {}", target, s.abort_reason );
          return s.graph;
        },
        targets, profile, config.model );
    if ( !abort.empty() )
    {
      fmt::print( err, "aborted: {}\n", abort );
      return exit_aborted;
    }
    auto const dir = prepare( config );
    write_file( dir / "report.csv", emit_report( rows ) );
    auto const front = pareto_front( rows );
    write_file( dir / "pareto.csv", emit_report( front ) );
    fmt::print( out, "{:>10} {:>6} {:>10} {:>10} {:>6}\n", "target", "area", "delay", "slack", "level" );
    for ( auto const& r : rows )
      fmt::print( out, "{:>10.4f} {:>6} {:>10.4f} {:>10.4f} {:>6}\n", r.target, r.area, r.delay, r.slack, r.level );
    fmt::print( out, "{} of {} designs on the area-delay front\nwrote {}\n", front.size(), rows.size(), dir.string() );
    return exit_ok;
  } );
}

int cmd_export( RunConfig const& config, std::ostream& out, std::ostream& err )
{
  return guarded( err, [&] {
    check( config );
    if ( config.input.empty() )
      throw std::invalid_argument( "export needs an input EPR file or topology name" );
    PrefixGraph graph{ 2 };
    if ( config.input == "serial" )
      graph = serial_graph( config.width );
    else if ( config.input == "sklansky" )
      graph = sklansky_graph( config.width );
    else if ( config.input == "kogge-stone" )
      graph = kogge_stone_graph( config.width );
    else if ( config.input == "brent-kung" )
      graph = brent_kung_graph( config.width );
    else
      graph = parse_epr( read_file( config.input ) );
    auto const dir = prepare( config );
    write_file( dir / "design.v", emit_verilog( graph, style_of( config ) ) );
    fmt::print( out, "wrote {}\n", ( dir / "design.v" ).string() );
    return exit_ok;
  } );
}

int cmd_verify( RunConfig const& config, std::ostream& out, std::ostream& err )
{
  return guarded( err, [&] {
    if ( config.input.empty() )
      throw std::invalid_argument( "verify needs an input file" );
    auto const text = read_file( config.input );
    VerifyOptions options;
    options.seed = config.seed == 0 ? 1 : config.seed;
    VerifyResult v;
    if ( fs::path( config.input ).extension() == ".v" )
      v = verify_netlist( Netlist::parse( text ), options );
    else
      v = verify_adder( parse_epr( text ), options );
    if ( !v.ok )
    {
      fmt::print( err, "{}: {}\n", config.input, describe( v ) );
      return exit_invalid;
    }
    fmt::print( out, "{}: {}\n", config.input, describe( v ) );
    return exit_ok;
  } );
}

} // namespace prefixopt
