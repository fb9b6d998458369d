#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "prefixopt/backbone.hpp"
#include "prefixopt/epr.hpp"
#include "prefixopt/refine.hpp"
#include "prefixopt/topologies.hpp"

using namespace prefixopt;

namespace
{

/// (3,0) = (3,2) o (1,0) and (2,0) = (2,2) o (1,0).
PrefixGraph shared_lower4()
{
  PrefixGraph g( 4 );
  g.add_node( { 1, 0 }, { 1, 1 }, { 0, 0 } );
  g.add_node( { 2, 0 }, { 2, 2 }, { 1, 0 } );
  g.add_node( { 3, 2 }, { 3, 3 }, { 2, 2 } );
  g.add_node( { 3, 0 }, { 3, 2 }, { 1, 0 } );
  return g;
}

} // namespace

TEST_CASE( "level_opt on the serial 4-bit adder", "[refine]" )
{
  auto const g = serial_graph( 4 );
  auto const r = level_opt( g, { 3, 0 } );
  REQUIRE( r.ok() );
  CHECK( *r->parents( { 3, 0 } ) == Parents{ { 3, 2 }, { 1, 0 } } );
  CHECK( *r->parents( { 3, 2 } ) == Parents{ { 3, 3 }, { 2, 2 } } );
  CHECK( r->level( { 3, 0 } ) == 2 );
  CHECK( r->size() == 4 );
  CHECK( oracle::adds_exhaustively( *r ) );

  auto const again = level_opt( *r, { 3, 0 } );
  REQUIRE_FALSE( again.ok() );
  CHECK( again.reason().find( "theoretical min" ) != std::string::npos );
  CHECK_FALSE( level_opt( g, { 2, 2 } ).ok() );
  CHECK_FALSE( level_opt( g, { 9, 0 } ).ok() );
}

TEST_CASE( "level_opt builds missing parents at the midpoint", "[refine]" )
{
  auto const g = serial_graph( 8 );
  auto const r = level_opt( g, { 7, 0 } );
  REQUIRE( r.ok() );
  // Best split k=4: (7,4) is built as (7,6) o (5,4) at level 2, (3,0) is at 3.
  // k=5 gives max(level(7,5)=2, level(4,0)=4); larger splits are worse.
  CHECK( *r->parents( { 7, 0 } ) == Parents{ { 7, 4 }, { 3, 0 } } );
  CHECK( r->level( { 7, 0 } ) == 4 );
  CHECK( r->size() == 7 + 3 );
  CHECK( oracle::adds_exhaustively( *r ) );
}

TEST_CASE( "fanout_opt re-splits one consumer", "[refine]" )
{
  auto const g = shared_lower4();
  REQUIRE( g.fanout( { 1, 0 } ) == 2 );
  auto const r = fanout_opt( g, { 1, 0 }, { 3, 0 } );
  REQUIRE( r.ok() );
  CHECK( *r->parents( { 3, 0 } ) == Parents{ { 3, 1 }, { 0, 0 } } );
  CHECK( *r->parents( { 3, 1 } ) == Parents{ { 3, 2 }, { 1, 1 } } );
  CHECK( r->ntf( { 1, 0 } ) == std::vector<NodeId>{ { 2, 0 } } );
  CHECK( oracle::adds_exhaustively( *r ) );

  CHECK_FALSE( fanout_opt( g, { 1, 0 }, { 3, 2 } ).ok() );
  auto const serial = serial_graph( 4 );
  auto const lone = fanout_opt( serial, { 1, 0 }, { 2, 0 } );
  REQUIRE_FALSE( lone.ok() );
  CHECK( lone.reason().find( "nothing to alleviate" ) != std::string::npos );
}

TEST_CASE( "node_clone splits the consumers", "[refine]" )
{
  // (1,0) feeds (2,0), (3,0) and (4,0).
  PrefixGraph g( 5 );
  g.add_node( { 1, 0 }, { 1, 1 }, { 0, 0 } );
  g.add_node( { 2, 0 }, { 2, 2 }, { 1, 0 } );
  g.add_node( { 3, 2 }, { 3, 3 }, { 2, 2 } );
  g.add_node( { 3, 0 }, { 3, 2 }, { 1, 0 } );
  g.add_node( { 4, 2 }, { 4, 3 }, { 2, 2 } );
  g.add_node( { 4, 3 }, { 4, 4 }, { 3, 3 } );
  g.add_node( { 4, 0 }, { 4, 2 }, { 1, 0 } );
  REQUIRE( validate( g ).ok() );
  REQUIRE( g.fanout( { 1, 0 } ) == 3 );

  auto const r = node_clone( g, { 1, 0 } );
  REQUIRE( r.ok() );
  NodeId const clone{ 1, 0, 1 };
  CHECK( r->contains( clone ) );
  CHECK( r->fanout( { 1, 0 } ) == 1 );
  CHECK( r->fanout( clone ) == 2 );
  CHECK( r->fanout( { 1, 1 } ) == 2 );
  CHECK( oracle::adds_exhaustively( *r ) );

  auto const twice = node_clone( *r, clone );
  REQUIRE( twice.ok() );
  CHECK( twice->contains( { 1, 0, 2 } ) );
  CHECK( render_epr( *twice ).find( "(1,0)#2" ) != std::string::npos );

  CHECK_FALSE( node_clone( serial_graph( 4 ), { 1, 0 } ).ok() );
}

TEST_CASE( "node_clone keeps critical consumers on the original", "[refine]" )
{
  PrefixGraph g( 5 );
  g.add_node( { 1, 0 }, { 1, 1 }, { 0, 0 } );
  g.add_node( { 2, 0 }, { 2, 2 }, { 1, 0 } );
  g.add_node( { 3, 2 }, { 3, 3 }, { 2, 2 } );
  g.add_node( { 3, 0 }, { 3, 2 }, { 1, 0 } );
  g.add_node( { 4, 3 }, { 4, 4 }, { 3, 3 } );
  g.add_node( { 4, 2 }, { 4, 3 }, { 2, 2 } );
  g.add_node( { 4, 0 }, { 4, 2 }, { 1, 0 } );
  // Bit 4 arrives late, so (4,0) waits on (4,2) rather than (1,0). At (3,0)
  // both drivers contribute 0.080 and (1,0) counts as critical.
  ArrivalProfile const prof( { 0, 0, 0, 0, 1.0 } );
  auto const report = graph_arrivals( g, prof, DelayModel{} );
  auto const r = node_clone( g, { 1, 0 }, &report );
  REQUIRE( r.ok() );
  CHECK( r->parents( { 4, 0 } )->lp == NodeId{ 1, 0, 1 } );
  CHECK( r->parents( { 2, 0 } )->lp == NodeId{ 1, 0 } );
  CHECK( r->parents( { 3, 0 } )->lp == NodeId{ 1, 0 } );
}

TEST_CASE( "action lines", "[refine]" )
{
  RefineAction const a{ RefineTool::fanout_opt, { 1, 0 }, NodeId{ 3, 0 } };
  CHECK( to_string( a ) == "fanout_opt (1,0) (3,0)" );
  CHECK( parse_refine_action( to_string( a ) ) == a );
  RefineAction const b{ RefineTool::node_clone, { 2, 0, 1 }, std::nullopt };
  CHECK( parse_refine_action( "node_clone (2,0)#1" ) == b );
  CHECK_FALSE( parse_refine_action( "fanout_opt (1,0)" ) );
  CHECK_FALSE( parse_refine_action( "level_opt (1,0) (3,0)" ) );
  CHECK_FALSE( parse_refine_action( "merge (1,0)" ) );
}

TEST_CASE( "randomized tool contracts", "[refine]" )
{
  std::mt19937_64 rng( 2024 );
  int applied = 0, attempts = 0;
  while ( applied < 300 && attempts < 20000 )
  {
    ++attempts;
    int const n = 3 + static_cast<int>( rng() % 6 );
    auto g = oracle::random_prefix_graph( n, rng );
    auto const nodes = g.non_inputs();
    auto const target = nodes[rng() % nodes.size()];
    auto const before = render_epr( g );
    switch ( rng() % 3 )
    {
    case 0:
    {
      auto const r = level_opt( g, target );
      CHECK( render_epr( g ) == before );
      if ( !r )
        continue;
      CHECK( r->level( target ) < g.level( target ) );
      CHECK( r->size() >= g.size() );
      REQUIRE( validate( *r ).ok() );
      REQUIRE( oracle::adds_exhaustively( *r ) );
      break;
    }
    case 1:
    {
      if ( g.ntf( target ).empty() )
        continue;
      auto const consumer = g.ntf( target )[rng() % g.ntf( target ).size()];
      auto const r = fanout_opt( g, target, consumer );
      if ( !r )
        continue;
      CHECK( r->fanout( target ) == g.fanout( target ) - 1 );
      CHECK( r->size() - g.size() <= 1 );
      REQUIRE( validate( *r ).ok() );
      REQUIRE( oracle::adds_exhaustively( *r ) );
      break;
    }
    default:
    {
      auto const r = node_clone( g, target );
      if ( !r )
        continue;
      CHECK( r->fanout( target ) < g.fanout( target ) );
      CHECK( r->size() == g.size() + 1 );
      REQUIRE( validate( *r ).ok() );
      REQUIRE( oracle::adds_exhaustively( *r ) );
    }
    }
    ++applied;
  }
  CHECK( applied == 300 );
}
