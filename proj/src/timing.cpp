#include "prefixopt/timing.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace prefixopt
{

DelayModel& DelayModel::with_slope( double k )
{
  slope_k = k;
  node_delay_d = k - margin_lambda;
  return *this;
}

DelayModel& DelayModel::with_node_delay( double d )
{
  node_delay_d = d;
  slope_k = d + margin_lambda;
  return *this;
}

DelayModel& DelayModel::with_margin( double lambda )
{
  margin_lambda = lambda;
  slope_k = node_delay_d + lambda;
  return *this;
}

void DelayModel::check() const
{
  if ( slope_k < 0 || intercept_b < 0 || node_delay_d < 0 || margin_lambda < 0 || fanout_beta < 0 )
    throw std::invalid_argument( "delay model parameters must be non-negative" );
  if ( std::abs( slope_k - step() ) > 1e-12 )
    throw std::invalid_argument( fmt::format( "delay model slope k={} differs from d+lambda={}", slope_k, step() ) );
}

ArrivalProfile::ArrivalProfile( std::vector<double> arrivals ) : arrivals_( std::move( arrivals ) )
{
  for ( std::size_t i = 0; i < arrivals_.size(); ++i )
    if ( !( arrivals_[i] >= 0.0 ) || !std::isfinite( arrivals_[i] ) )
      throw std::invalid_argument( fmt::format( "arrival of bit {} must be a finite non-negative time", i ) );
}

ArrivalProfile ArrivalProfile::uniform( int width, double arrival )
{
  return ArrivalProfile( std::vector<double>( static_cast<std::size_t>( width ), arrival ) );
}

ArrivalProfile ArrivalProfile::lsb_first( int width, double offset )
{
  std::vector<double> t( static_cast<std::size_t>( width ), 0.0 );
  for ( int i = width / 2; i < width; ++i )
    t[static_cast<std::size_t>( i )] = offset;
  return ArrivalProfile( std::move( t ) );
}

ArrivalProfile ArrivalProfile::random( int width, std::uint64_t seed, double max_arrival )
{
  std::mt19937_64 rng( seed );
  std::uniform_real_distribution<double> dist( 0.0, max_arrival );
  std::vector<double> t( static_cast<std::size_t>( width ) );
  for ( auto& x : t )
    x = max_arrival > 0.0 ? dist( rng ) : 0.0;
  return ArrivalProfile( std::move( t ) );
}

ArrivalProfile ArrivalProfile::parse( std::string_view text )
{
  std::map<int, double> by_bit;
  std::istringstream in{ std::string( text ) };
  std::string line;
  int line_no = 0;
  while ( std::getline( in, line ) )
  {
    ++line_no;
    if ( auto hash = line.find( '#' ); hash != std::string::npos )
      line.erase( hash );
    if ( line.find_first_not_of( " \t\r" ) == std::string::npos )
      continue;
    std::replace( line.begin(), line.end(), ',', ' ' );
    std::istringstream fields( line );
    int bit = -1;
    double arrival = 0.0;
    std::string rest;
    if ( !( fields >> bit >> arrival ) || ( fields >> rest ) || bit < 0 )
      throw std::invalid_argument( fmt::format( "arrival profile line {}: expected \"bit, arrival\"", line_no ) );
    if ( !by_bit.emplace( bit, arrival ).second )
      throw std::invalid_argument( fmt::format( "arrival profile line {}: duplicate bit {}", line_no, bit ) );
  }
  std::vector<double> t;
  for ( auto const& [bit, arrival] : by_bit )
  {
    if ( bit != static_cast<int>( t.size() ) )
      throw std::invalid_argument( fmt::format( "arrival profile has no entry for bit {}", t.size() ) );
    t.push_back( arrival );
  }
  return ArrivalProfile( std::move( t ) );
}

std::string ArrivalProfile::to_text() const
{
  std::string out;
  for ( std::size_t i = 0; i < arrivals_.size(); ++i )
    out += fmt::format( "{}, {}\n", i, arrivals_[i] );
  return out;
}

double driver_contribution( PrefixGraph const& graph, TimingReport const& report, NodeId const& p )
{
  return report.at( p ) + report.model.step() + report.model.fanout_beta * std::max( 0, graph.fanout( p ) - 1 );
}

TimingReport graph_arrivals( PrefixGraph const& graph, ArrivalProfile const& profile, DelayModel const& model, double target )
{
  if ( profile.width() != graph.width() )
    throw std::invalid_argument( fmt::format( "arrival profile covers {} bits, graph has {}", profile.width(), graph.width() ) );
  if ( !graph.is_complete() || !validate( graph ).ok() )
    throw std::invalid_argument( "timing analysis needs a complete, valid prefix graph" );

  TimingReport report;
  report.model = model;
  report.target = target;
  report.area = graph.size();

  auto order = graph.nodes();
  std::stable_sort( order.begin(), order.end(), [&]( auto const& x, auto const& y ) { return graph.level( x ) < graph.level( y ); } );
  for ( auto const& id : order )
  {
    auto const parents = graph.parents( id );
    if ( !parents )
    {
      report.arrival[id] = profile[id.msb];
      continue;
    }
    report.arrival[id] = std::max( driver_contribution( graph, report, parents->up ), driver_contribution( graph, report, parents->lp ) );
  }

  double worst = -1.0;
  for ( int i = 0; i < graph.width(); ++i )
  {
    NodeId const out{ i, 0 };
    if ( report.at( out ) >= worst )
    {
      worst = report.at( out );
      report.critical_end = out;
    }
  }
  report.delay = worst + model.intercept_b;
  report.slack = target - report.delay;

  NodeId cur = report.critical_end;
  while ( auto parents = graph.parents( cur ) )
  {
    double const up = driver_contribution( graph, report, parents->up );
    double const lp = driver_contribution( graph, report, parents->lp );
    cur = up > lp ? parents->up : parents->lp;
  }
  report.critical_start = cur;
  return report;
}

SweepRow make_row( PrefixGraph const& graph, TimingReport const& report )
{
  return { report.target, report.area, report.delay, report.slack, graph.size(), graph.depth(), deficiency( graph ) };
}

std::vector<SweepRow> pareto_sweep( std::function<PrefixGraph( double )> const& synthesize, std::vector<double> const& targets,
                                    ArrivalProfile const& profile, DelayModel const& model )
{
  if ( targets.empty() )
    throw std::invalid_argument( "pareto sweep needs at least one target delay" );
  std::vector<SweepRow> rows;
  for ( double const t : targets )
  {
    auto const graph = synthesize( t );
    rows.push_back( make_row( graph, graph_arrivals( graph, profile, model, t ) ) );
  }
  return rows;
}

std::vector<SweepRow> pareto_front( std::vector<SweepRow> rows )
{
  std::sort( rows.begin(), rows.end(), []( auto const& x, auto const& y ) {
    return x.delay != y.delay ? x.delay < y.delay : x.area < y.area;
  } );
  std::vector<SweepRow> front;
  for ( auto const& r : rows )
    if ( front.empty() || r.area < front.back().area )
      front.push_back( r );
  return front;
}

} // namespace prefixopt
