#include "prefixopt/report.hpp"

#include <charconv>
#include <sstream>

#include <fmt/format.h>

namespace prefixopt
{

namespace
{

constexpr std::string_view header = "target,area,delay,slack,size,level,deficiency";

template<typename T>
T field( std::string const& text, int line_no, char const* name )
{
  T value{};
  auto const* end = text.data() + text.size();
  auto const [ptr, ec] = std::from_chars( text.data(), end, value );
  if ( ec != std::errc{} || ptr != end )
    throw std::invalid_argument( fmt::format( "report line {}: bad {} \"{}\"", line_no, name, text ) );
  return value;
}

} // namespace

std::string emit_report( std::vector<SweepRow> const& rows )
{
  std::string out( header );
  out += "\n";
  for ( auto const& r : rows )
    out += fmt::format( "{},{},{},{},{},{},{}\n", r.target, r.area, r.delay, r.slack, r.size, r.level, r.deficiency );
  return out;
}

std::vector<SweepRow> parse_report( std::string_view text )
{
  std::istringstream in{ std::string( text ) };
  std::string line;
  if ( !std::getline( in, line ) || ( !line.empty() && line.back() == '\r' ? line.substr( 0, line.size() - 1 ) : line ) != header )
    throw std::invalid_argument( fmt::format( "report must start with \"{}\"", header ) );
  std::vector<SweepRow> rows;
  for ( int line_no = 2; std::getline( in, line ); ++line_no )
  {
    if ( !line.empty() && line.back() == '\r' )
      line.pop_back();
    if ( line.empty() )
      continue;
    std::vector<std::string> f;
    std::istringstream cells( line );
    for ( std::string cell; std::getline( cells, cell, ',' ); )
      f.push_back( cell );
    if ( f.size() != 7 )
      throw std::invalid_argument( fmt::format( "report line {}: expected 7 fields, found {}", line_no, f.size() ) );
    SweepRow r;
    r.target = field<double>( f[0], line_no, "target" );
    r.area = field<std::size_t>( f[1], line_no, "area" );
    r.delay = field<double>( f[2], line_no, "delay" );
    r.slack = field<double>( f[3], line_no, "slack" );
    r.size = field<std::size_t>( f[4], line_no, "size" );
    r.level = field<int>( f[5], line_no, "level" );
    r.deficiency = field<int>( f[6], line_no, "deficiency" );
    rows.push_back( r );
  }
  return rows;
}

} // namespace prefixopt
