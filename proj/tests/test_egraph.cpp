#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "prefixopt/egraph.hpp"
#include "prefixopt/trace.hpp"

using namespace prefixopt;

namespace
{

DelayModel unit_step()
{
  DelayModel m;
  m.with_node_delay( 1.0 ).with_margin( 0.0 );
  return m;
}

} // namespace

TEST_CASE( "hashconsing and congruence", "[esat]" )
{
  EGraph g;
  auto const x = g.add( ENode::make_leaf( 0 ) );
  CHECK( g.add( ENode::make_leaf( 0 ) ) == x );
  auto const y = g.add( ENode::make_leaf( 1 ) );
  auto const z = g.add( ENode::make_leaf( 2 ) );
  auto const xy = g.add( ENode::make_op( x, y ) );
  auto const yz = g.add( ENode::make_op( y, z ) );
  auto const l = g.add( ENode::make_op( xy, z ) );
  auto const r = g.add( ENode::make_op( x, yz ) );
  CHECK( g.lsb( l ) == 0 );
  CHECK( g.msb( l ) == 2 );
  CHECK( g.merge( l, r ) );
  CHECK_FALSE( g.merge( l, r ) );
  g.rebuild();
  CHECK( g.find( l ) == g.find( r ) );
  CHECK( g.nodes( l ).size() == 2 );
  CHECK_THROWS_AS( g.merge( x, xy ), std::logic_error );
}

TEST_CASE( "saturation represents every tree", "[esat]" )
{
  std::vector<int> const expected{ 2, 5, 14, 42, 132, 429 };
  for ( int n = 3; n <= 8; ++n )
  {
    auto const sat = saturate( BackboneExpr::serial( n ) );
    CHECK( sat.saturated );
    CHECK( count_terms( sat.graph, sat.root ) == expected[static_cast<std::size_t>( n - 3 )] );
    std::set<std::string> terms;
    for ( auto const& e : enumerate_terms( sat.graph, sat.root ) )
      terms.insert( e.to_string() );
    std::set<std::string> oracle_terms;
    for ( auto const& e : oracle::all_backbones( n ) )
      oracle_terms.insert( e.to_string() );
    CHECK( terms == oracle_terms );
  }
}

TEST_CASE( "every class covers one range", "[esat]" )
{
  auto const sat = saturate( BackboneExpr::serial( 9 ) );
  // One class per contiguous range.
  CHECK( sat.graph.class_count() == 9 * 10 / 2 );
  for ( auto c : sat.graph.classes() )
    for ( auto const& n : sat.graph.nodes( c ) )
      if ( !n.is_leaf() )
      {
        CHECK( sat.graph.lsb( n.lower ) == sat.graph.lsb( c ) );
        CHECK( sat.graph.msb( n.higher ) == sat.graph.msb( c ) );
        CHECK( sat.graph.msb( n.lower ) + 1 == sat.graph.lsb( n.higher ) );
      }
}

TEST_CASE( "saturation limits are reported", "[esat]" )
{
  auto const sat = saturate( BackboneExpr::serial( 12 ), { 1, 500000 } );
  CHECK_FALSE( sat.saturated );
  auto const ex = extract_optimal( sat, ArrivalProfile::uniform( 12 ), DelayModel{} );
  CHECK_FALSE( ex.warning.empty() );
}

TEST_CASE( "extraction examples", "[esat]" )
{
  auto const m = unit_step();
  auto const sat3 = saturate( BackboneExpr::serial( 3 ) );
  auto const ex = extract_optimal( sat3, ArrivalProfile( { 0, 0, 2 } ), m );
  CHECK( ex.expr.to_string() == "(o (o i0 i1) i2)" );
  CHECK( ex.cost == 3.0 );
  CHECK( oracle::term_cost( "(o i0 (o i1 i2))", { 0, 0, 2 }, 1.0 ) == 4.0 );

  auto const sat4 = saturate( BackboneExpr::serial( 4 ) );
  auto const bal = extract_optimal( sat4, ArrivalProfile::uniform( 4 ), m );
  CHECK( bal.expr.to_string() == "(o (o i0 i1) (o i2 i3))" );
  CHECK( bal.cost == 2.0 );
}

TEST_CASE( "extraction matches brute force", "[esat]" )
{
  std::mt19937_64 rng( 99 );
  DelayModel const m;
  for ( int n = 2; n <= 9; ++n )
  {
    auto const sat = saturate( BackboneExpr::serial( n ) );
    for ( int trial = 0; trial < 10; ++trial )
    {
      auto const prof = ArrivalProfile::random( n, rng(), 0.3 );
      auto const ex = extract_optimal( sat, prof, m );
      CHECK( ex.cost == oracle::brute_force_min_cost( n, prof.values(), m.step() ) );
      CHECK( ex.cost == oracle::term_cost( ex.expr.to_string(), prof.values(), m.step() ) );
    }
  }
}

TEST_CASE( "perturbed extraction", "[esat]" )
{
  DelayModel const m;
  auto const sat = saturate( BackboneExpr::serial( 8 ) );
  auto const prof = ArrivalProfile::uniform( 8 );
  auto const opt = extract_optimal( sat, prof, m );
  CHECK( extract_perturbed( sat, prof, m, 17, 0.0 ).expr == opt.expr );
  CHECK( extract_perturbed( sat, prof, m, 5, 1.0 ).expr == extract_perturbed( sat, prof, m, 5, 1.0 ).expr );
  CHECK_THROWS( extract_perturbed( sat, prof, m, 5, -1.0 ) );

  double const serial_cost = backbone_cost( BackboneExpr::serial( 8 ), prof, m );
  std::set<std::string> distinct;
  for ( std::uint64_t seed = 1; seed <= 100; ++seed )
  {
    auto const ex = extract_perturbed( sat, prof, m, seed, 1.0 );
    distinct.insert( ex.expr.to_string() );
    CHECK( ex.cost <= serial_cost );
    CHECK( ex.cost >= opt.cost );
  }
  CHECK( distinct.size() >= 2 );
}

TEST_CASE( "design space size", "[esat]" )
{
  CHECK( catalan( 0 ) == 1 );
  CHECK( catalan( 7 ) == 429 );
  CHECK( catalan( 15 ) == 9694845 );
  // Independent product via long double.
  long double log_product = 0;
  for ( unsigned i = 1; i <= 15; ++i )
    log_product += std::log10( static_cast<long double>( catalan( i ).convert_to<unsigned long long>() ) );
  auto const d = design_space( 16 );
  CHECK( d.full_log10 == Catch::Approx( static_cast<double>( log_product ) ).epsilon( 1e-9 ) );
  CHECK( d.full_log10 >= 48.0 );
  CHECK( d.full_log10 <= 50.0 );
  CHECK( d.backbone_log10 >= 6.0 );
  CHECK( d.backbone_log10 <= 7.1 );
}

TEST_CASE( "trace derivation examples", "[trace]" )
{
  auto const balanced4 = BackboneExpr::parse( "(o (o i0 i1) (o i2 i3))" );
  auto const t4 = derive_trace( balanced4 );
  REQUIRE( t4.steps.size() == 1 );
  CHECK( t4.steps[0] == RegroupCandidate{ { 3, 3 }, { 2, 2 } } );

  CHECK( derive_trace( BackboneExpr::serial( 7 ) ).steps.empty() );

  auto const balanced8 = BackboneExpr::parse( "(o (o (o i0 i1) (o i2 i3)) (o (o i4 i5) (o i6 i7)))" );
  auto const t8 = derive_trace( balanced8 );
  REQUIRE( t8.steps.size() == 4 );
  CHECK( t8.steps.back() == RegroupCandidate{ { 7, 6 }, { 5, 4 } } );
  // The state right before the last step is the mixed form.
  RegroupTrace prefix{ 8, { t8.steps.begin(), t8.steps.end() - 1 } };
  CHECK( BackboneExpr::from_backbone( replay( prefix ).value() ).to_string() == "(o (o (o (o i0 i1) (o i2 i3)) (o i4 i5)) (o i6 i7))" );
}

TEST_CASE( "traces replay to their targets", "[trace]" )
{
  for ( int n = 2; n <= 8; ++n )
    for ( auto const& e : oracle::all_backbones( n ) )
    {
      auto const t = derive_trace( e );
      auto const r = replay( t );
      REQUIRE( r.ok() );
      REQUIRE( *r == e.to_backbone() );
      int internal_nonridge = 0;
      for ( auto const& [id, p] : r->nodes() )
        internal_nonridge += id.lsb > 0;
      CHECK( static_cast<int>( t.steps.size() ) == internal_nonridge );
    }
}

TEST_CASE( "trace text round-trips", "[trace]" )
{
  auto const t = derive_trace( BackboneExpr::parse( "(o (o i0 (o i1 i2)) (o i3 i4))" ) );
  CHECK( parse_trace( 5, to_text( t ) ) == t );
  CHECK_THROWS( parse_trace( 5, "regroup 1 2 3\n" ) );
  CHECK_THROWS( parse_trace( 5, "merge 1 2 3 4\n" ) );
  CHECK_FALSE( replay( parse_trace( 4, "regroup 3 3 1 1\n" ) ).ok() );
}

TEST_CASE( "low-deficiency filter", "[trace]" )
{
  std::vector<BackboneExpr> const all = oracle::all_backbones( 8 );
  CHECK( filter_low_deficiency( all, 8 ).size() == all.size() );

  // The completed balanced tree is one level deeper than its backbone.
  auto const balanced = BackboneExpr::parse( "(o (o (o i0 i1) (o i2 i3)) (o (o i4 i5) (o i6 i7)))" );
  CHECK( level_increase( balanced.to_backbone() ) == 1 );
  CHECK( filter_low_deficiency( { balanced }, 0 ).empty() );

  std::size_t kept_below_serial = 0, raised_by_two = 0;
  for ( auto const& e : filter_low_deficiency( all, 0 ) )
  {
    auto const b = e.to_backbone();
    auto const g = complete( b );
    CHECK( g.depth() == b.root_level() );
    CHECK( deficiency( g ) == b.root_level() - backbone_stats( b ).ridge );
    kept_below_serial += b.root_level() < 7;
  }
  for ( auto const& e : all )
    if ( level_increase( e.to_backbone() ) == 2 )
    {
      ++raised_by_two;
      CHECK( filter_low_deficiency( { e }, 0 ).empty() );
    }
  CHECK( kept_below_serial > 0 );
  CHECK( raised_by_two > 0 );
}
