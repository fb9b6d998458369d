#include "prefixopt/epr.hpp"

#include <algorithm>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace prefixopt
{

namespace
{

std::string join_nodes( std::vector<NodeId> const& ids )
{
  std::string out = "[";
  for ( std::size_t i = 0; i < ids.size(); ++i )
  {
    if ( i )
      out += ", ";
    out += to_string( ids[i] );
  }
  return out + "]";
}

std::vector<NodeId> epr_non_input_order( PrefixGraph const& graph )
{
  auto ids = graph.non_inputs();
  std::stable_sort( ids.begin(), ids.end(), []( auto const& x, auto const& y ) {
    if ( x.msb != y.msb )
      return x.msb > y.msb;
    if ( x.lsb != y.lsb )
      return x.lsb < y.lsb;
    return x.instance < y.instance;
  } );
  return ids;
}

std::string const node_pattern = R"(\(\d+,\d+\)(?:#\d+)?)";

std::vector<NodeId> parse_list( std::string const& text, int line )
{
  static std::regex const item( node_pattern );
  std::vector<NodeId> out;
  for ( std::sregex_iterator it( text.begin(), text.end(), item ), end; it != end; ++it )
    out.push_back( *parse_node_id( it->str() ) );
  // Everything between items must be ", ".
  std::string rebuilt;
  for ( std::size_t i = 0; i < out.size(); ++i )
    rebuilt += ( i ? ", " : "" ) + to_string( out[i] );
  if ( rebuilt != text )
    throw EprParseError( line, "malformed node list [" + text + "]" );
  return out;
}

NodeId parse_id( std::string const& text, int line )
{
  auto id = parse_node_id( text );
  if ( !id )
    throw EprParseError( line, "malformed node id " + text );
  return *id;
}

} // namespace

std::string render_epr( PrefixGraph const& graph )
{
  std::string out;
  out += fmt::format( "Bitwidth: {}\n", graph.width() );
  out += fmt::format( "Non-input nodes: {}\n", graph.size() );
  out += fmt::format( "Max level: {}\n", graph.depth() );
  out += fmt::format( "Max fanout: {}\n", graph.max_fanout() );
  out += "\nInput nodes:\n";
  for ( auto const& id : graph.inputs() )
    out += fmt::format( "{}, tf: {}, ntf: {}\n", to_string( id ), join_nodes( graph.tf( id ) ), join_nodes( graph.ntf( id ) ) );
  out += "\nNon-input nodes:\n";
  for ( auto const& id : epr_non_input_order( graph ) )
  {
    auto const p = *graph.parents( id );
    out += fmt::format( "{},lvl:{},up:{},lp:{},tf:{},ntf: {}\n", to_string( id ), graph.level( id ), to_string( p.up ), to_string( p.lp ),
                        join_nodes( graph.tf( id ) ), join_nodes( graph.ntf( id ) ) );
  }
  return out;
}

EprParseError::EprParseError( int line, std::string const& what )
    : std::runtime_error( fmt::format( "EPR line {}: {}", line, what ) ), line_( line )
{
}

PrefixGraph parse_epr( std::string_view text )
{
  static std::regex const header( R"(^(Bitwidth|Non-input nodes|Max level|Max fanout): (\d+)$)" );
  static std::regex const input_line( "^(" + node_pattern + R"(), tf: \[(.*)\], ntf: \[(.*)\]$)" );
  static std::regex const node_line( "^(" + node_pattern + R"(),lvl:(\d+),up:()" + node_pattern + "),lp:(" + node_pattern +
                                     R"(),tf:\[(.*)\],ntf: \[(.*)\]$)" );

  enum class Section
  {
    header,
    inputs,
    non_inputs
  } section = Section::header;

  struct Declared
  {
    int line;
    NodeId id;
    int level;
    std::vector<NodeId> tf, ntf;
  };
  std::map<std::string, std::pair<int, long>> head;
  std::vector<Declared> declared;
  std::vector<std::pair<int, std::pair<NodeId, Parents>>> edges;

  std::istringstream in{ std::string( text ) };
  std::string line;
  int line_no = 0;
  while ( std::getline( in, line ) )
  {
    ++line_no;
    if ( !line.empty() && line.back() == '\r' )
      line.pop_back();
    if ( line.empty() )
      continue;
    std::smatch m;
    if ( line == "Input nodes:" )
    {
      section = Section::inputs;
      continue;
    }
    if ( line == "Non-input nodes:" )
    {
      section = Section::non_inputs;
      continue;
    }
    switch ( section )
    {
    case Section::header:
      if ( !std::regex_match( line, m, header ) )
        throw EprParseError( line_no, "expected header field, got \"" + line + "\"" );
      if ( !head.emplace( m[1].str(), std::pair{ line_no, std::stol( m[2].str() ) } ).second )
        throw EprParseError( line_no, "duplicate header field " + m[1].str() );
      break;
    case Section::inputs:
      if ( !std::regex_match( line, m, input_line ) )
        throw EprParseError( line_no, "malformed input node line \"" + line + "\"" );
      {
        auto const id = parse_id( m[1].str(), line_no );
        if ( !id.is_input() || id.instance != 0 )
          throw EprParseError( line_no, to_string( id ) + " is not an input node" );
        declared.push_back( { line_no, id, 0, parse_list( m[2].str(), line_no ), parse_list( m[3].str(), line_no ) } );
      }
      break;
    case Section::non_inputs:
      if ( !std::regex_match( line, m, node_line ) )
        throw EprParseError( line_no, "malformed non-input node line \"" + line + "\"" );
      {
        auto const id = parse_id( m[1].str(), line_no );
        declared.push_back( { line_no, id, std::stoi( m[2].str() ), parse_list( m[5].str(), line_no ), parse_list( m[6].str(), line_no ) } );
        edges.push_back( { line_no, { id, Parents{ parse_id( m[3].str(), line_no ), parse_id( m[4].str(), line_no ) } } } );
      }
      break;
    }
  }

  auto bitwidth = head.find( "Bitwidth" );
  if ( bitwidth == head.end() )
    throw EprParseError( line_no, "missing Bitwidth header" );
  if ( bitwidth->second.second < 1 || bitwidth->second.second > 4096 )
    throw EprParseError( bitwidth->second.first, "unsupported bit width" );

  auto graph = PrefixGraph::without_inputs( static_cast<int>( bitwidth->second.second ) );
  std::set<NodeId> seen;
  for ( auto const& d : declared )
    if ( !seen.insert( d.id ).second )
      throw EprParseError( d.line, "duplicate node " + to_string( d.id ) );
  for ( auto const& d : declared )
    if ( d.id.is_input() && d.id.instance == 0 && std::none_of( edges.begin(), edges.end(), [&]( auto const& e ) { return e.second.first == d.id; } ) )
      graph.add_input( d.id.msb );
  for ( auto const& [ln, edge] : edges )
    graph.set_parents( edge.first, edge.second );

  if ( !validate( graph ).ok() )
    return graph;

  auto check = [&]( std::string const& field, long actual ) {
    auto it = head.find( field );
    if ( it != head.end() && it->second.second != actual )
      throw EprParseError( it->second.first, fmt::format( "{} declared {} but graph has {}", field, it->second.second, actual ) );
  };
  check( "Non-input nodes", static_cast<long>( graph.size() ) );
  check( "Max level", graph.depth() );
  check( "Max fanout", graph.max_fanout() );
  for ( auto const& d : declared )
  {
    if ( graph.level( d.id ) != d.level )
      throw EprParseError( d.line, fmt::format( "{} declares level {} but its parents give {}", to_string( d.id ), d.level, graph.level( d.id ) ) );
    if ( graph.tf( d.id ) != d.tf || graph.ntf( d.id ) != d.ntf )
      throw EprParseError( d.line, fmt::format( "{} fanout lists disagree with parent links", to_string( d.id ) ) );
  }
  return graph;
}

CriticalPath critical_path( PrefixGraph const& graph, TimingReport const& report, NodeId const& start, NodeId const& end )
{
  if ( !graph.contains( start ) || graph.parents( start ) )
    throw std::invalid_argument( "critical path start " + to_string( start ) + " is not an input" );
  if ( !graph.contains( end ) )
    throw std::invalid_argument( "critical path end " + to_string( end ) + " is not in the graph" );

  // Forward closure of `start`.
  std::set<NodeId> reach{ start };
  std::vector<NodeId> work{ start };
  while ( !work.empty() )
  {
    auto cur = work.back();
    work.pop_back();
    for ( auto const& c : graph.consumers( cur ) )
      if ( reach.insert( c ).second )
        work.push_back( c );
  }
  if ( !reach.count( end ) )
    throw std::invalid_argument( "no path from " + to_string( start ) + " to " + to_string( end ) );

  std::vector<PathEntry> reversed;
  NodeId cur = end;
  while ( true )
  {
    reversed.push_back( { cur, graph.level( cur ) } );
    if ( cur == start )
      break;
    auto const p = *graph.parents( cur );
    bool const up_ok = reach.count( p.up ) != 0;
    bool const lp_ok = reach.count( p.lp ) != 0;
    if ( up_ok && lp_ok )
      cur = driver_contribution( graph, report, p.up ) > driver_contribution( graph, report, p.lp ) ? p.up : p.lp;
    else
      cur = up_ok ? p.up : p.lp;
  }

  CriticalPath path;
  path.nodes.assign( reversed.rbegin(), reversed.rend() );
  path.theoretical_min = min_levels( end.span() );
  path.actual = graph.level( end );
  return path;
}

std::string render_critical_path( PrefixGraph const& graph, CriticalPath const& path )
{
  std::string out;
  for ( auto const& [id, level] : path.nodes )
  {
    auto const parents = graph.parents( id );
    if ( !parents )
      out += fmt::format( "Lvl {}: {}, [INPUT] tf: {}, ntf: {}\n", level, to_string( id ), join_nodes( graph.tf( id ) ), join_nodes( graph.ntf( id ) ) );
    else
      out += fmt::format( "Lvl {}:{},up:{},lp:{}, tf:{}, ntf:{}\n", level, to_string( id ), to_string( parents->up ), to_string( parents->lp ),
                          join_nodes( graph.tf( id ) ), join_nodes( graph.ntf( id ) ) );
  }
  out += fmt::format( "\n- Lvl efficiency:{}/{}(theoretical min:{}, actual:{})\n", path.theoretical_min, path.actual, path.theoretical_min, path.actual );
  return out;
}

} // namespace prefixopt
