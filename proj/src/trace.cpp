#include "prefixopt/trace.hpp"

#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace prefixopt
{

Outcome<Backbone> replay( RegroupTrace const& trace )
{
  if ( trace.width < 2 )
    return reject( "trace width must be at least 2" );
  auto current = Backbone::serial( trace.width );
  for ( std::size_t i = 0; i < trace.steps.size(); ++i )
  {
    auto const& step = trace.steps[i];
    auto next = regroup( current, step.a, step.b );
    if ( !next )
      return reject( fmt::format( "step {} regroup {}: {}", i + 1, to_string( step ), next.reason() ) );
    current = std::move( next ).value();
  }
  return current;
}

RegroupTrace derive_trace( Backbone const& target )
{
  RegroupTrace trace{ target.width(), {} };
  auto current = Backbone::serial( target.width() );
  while ( !( current == target ) )
  {
    bool advanced = false;
    auto const candidates = find_candidates( current );
    for ( auto it = candidates.rbegin(); it != candidates.rend(); ++it )
    {
      auto const& c = *it;
      NodeId const created{ c.a.msb, c.b.lsb };
      NodeId const removed{ c.b.msb, 0 };
      if ( !target.contains( created ) || target.contains( removed ) )
        continue;
      current = regroup( current, c.a, c.b ).value();
      trace.steps.push_back( c );
      advanced = true;
      break;
    }
    if ( !advanced )
      throw std::logic_error( "derive_trace: no regroup candidate moves toward the target backbone" );
  }
  return trace;
}

RegroupTrace derive_trace( BackboneExpr const& target )
{
  return derive_trace( target.to_backbone() );
}

std::string to_text( RegroupTrace const& trace )
{
  std::string out;
  for ( auto const& s : trace.steps )
    out += fmt::format( "regroup {} {} {} {}\n", s.a.msb, s.a.lsb, s.b.msb, s.b.lsb );
  return out;
}

RegroupTrace parse_trace( int width, std::string_view text )
{
  RegroupTrace trace{ width, {} };
  std::istringstream in{ std::string( text ) };
  std::string line;
  int line_no = 0;
  while ( std::getline( in, line ) )
  {
    ++line_no;
    if ( auto hash = line.find( '#' ); hash != std::string::npos )
      line.erase( hash );
    std::istringstream fields( line );
    std::string word;
    if ( !( fields >> word ) )
      continue;
    RegroupCandidate step;
    std::string rest;
    if ( word != "regroup" || !( fields >> step.a.msb >> step.a.lsb >> step.b.msb >> step.b.lsb ) || ( fields >> rest ) )
      throw std::invalid_argument( fmt::format( "trace line {}: expected \"regroup a.msb a.lsb b.msb b.lsb\"", line_no ) );
    trace.steps.push_back( step );
  }
  return trace;
}

int level_increase( Backbone const& backbone )
{
  return complete( backbone ).depth() - backbone.root_level();
}

std::vector<BackboneExpr> filter_low_deficiency( std::vector<BackboneExpr> const& candidates, int threshold )
{
  std::vector<BackboneExpr> kept;
  for ( auto const& e : candidates )
    if ( level_increase( e.to_backbone() ) <= threshold )
      kept.push_back( e );
  return kept;
}

} // namespace prefixopt
