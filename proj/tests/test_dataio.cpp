#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "prefixopt/prompts.hpp"
#include "prefixopt/report.hpp"
#include "prefixopt/samples.hpp"
#include "prefixopt/topologies.hpp"
#include "prefixopt/verify.hpp"
#include "prefixopt/verilog.hpp"

using namespace prefixopt;

namespace
{

bool contains( std::string const& text, std::string const& part ) { return text.find( part ) != std::string::npos; }

// Every operand pair through the netlist, compared with machine addition.
bool netlist_adds_exhaustively( Netlist const& net, int width )
{
  std::uint64_t const total = std::uint64_t{ 1 } << ( 2 * width );
  std::uint64_t const mask = ( std::uint64_t{ 1 } << width ) - 1;
  for ( std::uint64_t base = 0; base < total; base += 64 )
  {
    std::vector<std::uint64_t> a( static_cast<std::size_t>( width ) ), b( static_cast<std::size_t>( width ) );
    for ( int lane = 0; lane < 64; ++lane )
    {
      auto const v = ( base + static_cast<std::uint64_t>( lane ) ) % total;
      for ( int i = 0; i < width; ++i )
      {
        a[static_cast<std::size_t>( i )] |= ( v >> i & 1 ) << lane;
        b[static_cast<std::size_t>( i )] |= ( v >> ( i + width ) & 1 ) << lane;
      }
    }
    auto const out = evaluate_adder( net, a, b );
    for ( int lane = 0; lane < 64; ++lane )
    {
      auto const v = ( base + static_cast<std::uint64_t>( lane ) ) % total;
      auto const expect = ( v & mask ) + ( v >> width & mask );
      std::uint64_t got = ( out.cout >> lane & 1 ) << width;
      for ( int i = 0; i < width; ++i )
        got |= ( out.sum[static_cast<std::size_t>( i )] >> lane & 1 ) << i;
      if ( got != expect )
        return false;
    }
  }
  return true;
}

PrefixGraph with_clone()
{
  // Kogge-Stone 8 with (3,0) cloned for (7,0).
  auto g = kogge_stone_graph( 8 );
  g.set_parents( { 3, 0, 1 }, *g.parents( { 3, 0 } ) );
  g.add_node( { 7, 0 }, { 7, 4 }, { 3, 0, 1 } );
  return g;
}

} // namespace

TEST_CASE( "a single regroup becomes a two-turn sample", "[dataio]" )
{
  RegroupTrace const trace{ 4, { { { 3, 3 }, { 2, 2 } } } };
  auto const prof = ArrivalProfile::uniform( 4 );
  auto const samples = synthesize_samples( { trace }, prof, DelayModel{}, 0.07 );
  REQUIRE( samples.size() == 1 );
  auto const& s = samples[0];
  CHECK( s.system == system_prompt() );
  REQUIRE( s.turns.size() == 2 );
  CHECK( s.turns[0].tool == "regroup" );
  CHECK( s.turns[0].arguments == nlohmann::json{ { "a", "(3,3)" }, { "b", "(2,2)" } } );
  CHECK( s.turns[0].think == "<think></think>" );
  CHECK( contains( s.turns[0].feedback, "(3,2) [arrival=" ) );
  CHECK( contains( s.turns[0].feedback, "Regroup candidates:\n1. a=(3,2) b=(1,1)" ) );
  CHECK( s.turns[0].state == make_phase1_context( Backbone::serial( 4 ), prof, DelayModel{}, 0.07, 1, 2 ).prompt );
  CHECK( s.turns[1].tool == "finish_1" );
  CHECK( contains( s.turns[1].state, s.turns[0].feedback ) );
  CHECK( s.metadata["backbone_level"] == 2 );
  CHECK( replay_sample( s ).value() == replay( trace ).value() );
}

TEST_CASE( "an empty trace is a lone finish", "[dataio]" )
{
  auto const samples = synthesize_samples( { RegroupTrace{ 5, {} } }, ArrivalProfile::uniform( 5 ), DelayModel{}, 0.0 );
  REQUIRE( samples.size() == 1 );
  REQUIRE( samples[0].turns.size() == 1 );
  CHECK( samples[0].turns[0].tool == "finish_1" );
  CHECK( replay_sample( samples[0] ).value() == Backbone::serial( 5 ) );
}

TEST_CASE( "traces that do not replay are skipped", "[dataio]" )
{
  std::vector<std::string> why;
  std::vector<RegroupTrace> const traces{ { 4, { { { 3, 3 }, { 1, 1 } } } }, { 4, { { { 3, 3 }, { 2, 2 } } } }, { 5, {} } };
  auto const samples = synthesize_samples( traces, ArrivalProfile::uniform( 4 ), DelayModel{}, 0.0, &why );
  CHECK( samples.size() == 1 );
  REQUIRE( why.size() == 2 );
  CHECK( contains( why[0], "trace 0" ) );
  CHECK( contains( why[0], "not a regroup candidate" ) );
  CHECK( contains( why[1], "trace 2" ) );
}

TEST_CASE( "sample records round-trip and replay", "[dataio]" )
{
  std::mt19937_64 rng( 17 );
  std::vector<RegroupTrace> traces;
  std::map<int, std::vector<BackboneExpr>> trees;
  for ( int n = 2; n <= 10; ++n )
    trees[n] = oracle::all_backbones( n );
  while ( traces.size() < 1000 )
  {
    auto const& pool = trees[2 + static_cast<int>( rng() % 9 )];
    traces.push_back( derive_trace( pool[rng() % pool.size()] ) );
  }
  // One profile per width keeps the fixture cheap.
  std::vector<TrainingSample> samples;
  for ( int n = 2; n <= 10; ++n )
  {
    std::vector<RegroupTrace> group;
    for ( auto const& t : traces )
      if ( t.width == n )
        group.push_back( t );
    auto const part = synthesize_samples( group, ArrivalProfile::random( n, static_cast<std::uint64_t>( n ), 0.05 ), DelayModel{}, 0.1 );
    CHECK( part.size() == group.size() );
    samples.insert( samples.end(), part.begin(), part.end() );
  }
  REQUIRE( samples.size() == 1000 );

  auto const text = emit_samples( samples );
  CHECK( std::count( text.begin(), text.end(), '\n' ) == 1000 );
  auto const back = parse_samples( text );
  REQUIRE( back.size() == samples.size() );
  CHECK( back == samples );

  std::size_t replayed = 0;
  for ( auto const& s : back )
  {
    auto const b = replay_sample( s );
    REQUIRE( b );
    CHECK( s.turns.size() == static_cast<std::size_t>( b->width() - backbone_stats( *b ).ridge ) );
    replayed += b.ok();
  }
  CHECK( replayed == 1000 );
}

TEST_CASE( "sample parsing rejects malformed lines", "[dataio]" )
{
  auto const good = emit_samples( synthesize_samples( { RegroupTrace{ 3, {} } }, ArrivalProfile::uniform( 3 ), DelayModel{}, 0.0 ) );
  CHECK( parse_samples( good + "\n" ).size() == 1 );
  CHECK_THROWS_WITH( parse_samples( good + "{\"width\": 3}\n" ), Catch::Matchers::ContainsSubstring( "sample line 2" ) );
  CHECK_THROWS_WITH( parse_samples( "not json\n" ), Catch::Matchers::ContainsSubstring( "sample line 1" ) );

  auto s = parse_samples( good )[0];
  s.turns[0].tool = "level_opt";
  s.turns[0].arguments = { { "target", "(2,0)" } };
  CHECK_FALSE( replay_sample( s ) );
  s.turns.clear();
  CHECK_FALSE( replay_sample( s ) );
}

TEST_CASE( "Verilog header follows the width", "[dataio]" )
{
  auto const text = emit_verilog( serial_graph( 6 ) );
  CHECK( text.rfind( "module prefix_adder_6 (a, b, s, cout);\n"
                     "  input [5:0] a;\n"
                     "  input [5:0] b;\n"
                     "  output [5:0] s;\n"
                     "  output cout;\n",
                     0 ) == 0 );
  auto const inv = emit_verilog( serial_graph( 6 ), VerilogStyle::inverting );
  CHECK( contains( inv, "module AOI21 (y, a0, a1, b);" ) );
  CHECK( contains( inv, "module prefix_adder_6 (a, b, s, cout);\n  input [5:0] a;" ) );
  CHECK( Netlist::parse( inv ).top() == "prefix_adder_6" );
  CHECK( Netlist::parse( text ).port_width( "s" ) == 6 );
}

TEST_CASE( "2-bit netlist adds on all 16 operand pairs", "[dataio]" )
{
  for ( auto style : { VerilogStyle::plain, VerilogStyle::inverting } )
  {
    auto const net = Netlist::parse( emit_verilog( serial_graph( 2 ), style ) );
    CHECK( netlist_adds_exhaustively( net, 2 ) );
  }
}

TEST_CASE( "both Verilog styles add on every graph up to 5 bits", "[dataio]" )
{
  for ( int n = 2; n <= 5; ++n )
    for ( auto const& g : oracle::enumerate_prefix_graphs( n ) )
    {
      if ( !g.is_complete() )
        continue;
      for ( auto style : { VerilogStyle::plain, VerilogStyle::inverting } )
      {
        auto const net = Netlist::parse( emit_verilog( g, style ) );
        REQUIRE( netlist_adds_exhaustively( net, n ) );
      }
    }
}

TEST_CASE( "netlists agree with graph simulation at 6 bits", "[dataio]" )
{
  std::mt19937_64 rng( 23 );
  std::vector<PrefixGraph> graphs{ serial_graph( 6 ), sklansky_graph( 6 ), kogge_stone_graph( 6 ), brent_kung_graph( 6 ) };
  for ( int i = 0; i < 40; ++i )
    graphs.push_back( oracle::random_prefix_graph( 6, rng ) );
  for ( auto const& g : graphs )
  {
    auto const plain = Netlist::parse( emit_verilog( g ) );
    auto const inv = Netlist::parse( emit_verilog( g, VerilogStyle::inverting ) );
    for ( std::uint64_t base = 0; base < 4096; base += 64 )
    {
      std::vector<std::uint64_t> a( 6 ), b( 6 );
      for ( int lane = 0; lane < 64; ++lane )
        for ( int bit = 0; bit < 6; ++bit )
        {
          auto const v = base + static_cast<std::uint64_t>( lane );
          a[static_cast<std::size_t>( bit )] |= ( v >> bit & 1 ) << lane;
          b[static_cast<std::size_t>( bit )] |= ( v >> ( bit + 6 ) & 1 ) << lane;
        }
      auto const ref = simulate_sliced( g, a, b );
      auto const p = evaluate_adder( plain, a, b );
      auto const q = evaluate_adder( inv, a, b );
      REQUIRE( p.sum == ref.sum );
      REQUIRE( q.sum == ref.sum );
      REQUIRE( p.cout == ref.cout );
      REQUIRE( q.cout == ref.cout );
    }
  }
}

TEST_CASE( "Verilog emission of clones and wide graphs", "[dataio]" )
{
  auto const g = with_clone();
  REQUIRE( validate( g ).ok() );
  auto const text = emit_verilog( g );
  CHECK( contains( text, "g_3_0_c1" ) );
  CHECK( text == emit_verilog( g ) );
  CHECK( emit_verilog( g, VerilogStyle::inverting ) == emit_verilog( g, VerilogStyle::inverting ) );
  for ( auto style : { VerilogStyle::plain, VerilogStyle::inverting } )
    CHECK( netlist_adds_exhaustively( Netlist::parse( emit_verilog( g, style ) ), 8 ) );

  for ( int n : { 16, 32, 64 } )
    for ( auto style : { VerilogStyle::plain, VerilogStyle::inverting } )
    {
      auto const v = verify_netlist( Netlist::parse( emit_verilog( kogge_stone_graph( n ), style ) ), { 10, 20000, 3 } );
      CAPTURE( n );
      CHECK( v.ok );
    }

  CHECK_THROWS_AS( emit_verilog( PrefixGraph::without_inputs( 4 ) ), std::invalid_argument );
  auto const cone = regroup( Backbone::serial( 4 ), { 3, 3 }, { 2, 2 } ).value().to_graph();
  CHECK_THROWS_AS( emit_verilog( cone ), std::invalid_argument );
}

TEST_CASE( "netlist interpreter rejects what it cannot evaluate", "[dataio]" )
{
  auto const head = std::string( "module t (x, y);\n input x;\n output y;\n wire w;\n" );
  CHECK_NOTHROW( Netlist::parse( head + " not (w, x);\n buf (y, w);\nendmodule\n" ) );
  CHECK_THROWS_WITH( Netlist::parse( head + " buf (y, w);\nendmodule\n" ), Catch::Matchers::ContainsSubstring( "undriven" ) );
  CHECK_THROWS_WITH( Netlist::parse( head + " not (w, y);\n buf (y, w);\nendmodule\n" ), Catch::Matchers::ContainsSubstring( "loop" ) );
  CHECK_THROWS_WITH( Netlist::parse( head + " not (y, x);\n buf (y, x);\nendmodule\n" ), Catch::Matchers::ContainsSubstring( "twice" ) );
  CHECK_THROWS_WITH( Netlist::parse( head + " MUX2 u0 (y, x, x, x);\nendmodule\n" ), Catch::Matchers::ContainsSubstring( "unknown module" ) );
  CHECK_THROWS_WITH( Netlist::parse( head + " buf (y, z);\nendmodule\n" ), Catch::Matchers::ContainsSubstring( "undeclared" ) );
  CHECK_THROWS_AS( Netlist::parse( head + " buf (y, x)\nendmodule\n" ), std::invalid_argument );
  // comments and assigns
  auto const ok = Netlist::parse( "// inverter\nmodule t (x, y); /* ports */ input x; output y; wire w; assign w = x; not (y, w); endmodule" );
  auto const out = ok.evaluate( { { "x", { 0b1010 } } } );
  CHECK( out.at( "y" )[0] == ~std::uint64_t{ 0b1010 } );
}

TEST_CASE( "report CSV", "[dataio]" )
{
  SweepRow const r{ 0.1, 12, 0.105, -0.005, 12, 3, 1 };
  auto const one = emit_report( { r } );
  CHECK( one == "target,area,delay,slack,size,level,deficiency\n0.1,12,0.105,-0.005,12,3,1\n" );
  CHECK( std::count( one.begin(), one.end(), '\n' ) == 2 );

  std::vector<SweepRow> rows;
  std::mt19937_64 rng( 3 );
  std::uniform_real_distribution<double> u( 0.0, 2.0 );
  for ( int i = 0; i < 6; ++i )
    rows.push_back( { u( rng ), rng() % 500, u( rng ), u( rng ) - 1.0, rng() % 500, static_cast<int>( rng() % 30 ), static_cast<int>( rng() % 9 ) } );
  auto const text = emit_report( rows );
  CHECK( std::count( text.begin(), text.end(), '\n' ) == 7 );
  CHECK( parse_report( text ) == rows );
  CHECK( parse_report( emit_report( {} ) ).empty() );

  CHECK_THROWS_AS( parse_report( "a,b\n" ), std::invalid_argument );
  CHECK_THROWS_WITH( parse_report( "target,area,delay,slack,size,level,deficiency\n1,2,3\n" ), Catch::Matchers::ContainsSubstring( "line 2" ) );
  CHECK_THROWS_AS( parse_report( "target,area,delay,slack,size,level,deficiency\n1,x,3,4,5,6,7\n" ), std::invalid_argument );
}

TEST_CASE( "adder verification", "[dataio]" )
{
  auto const small = verify_adder( serial_graph( 8 ) );
  CHECK( small.ok );
  CHECK( small.exhaustive );
  CHECK( small.vectors == 65536 );

  auto const wide = verify_adder( sklansky_graph( 32 ) );
  CHECK( wide.ok );
  CHECK_FALSE( wide.exhaustive );
  CHECK( wide.vectors == 100000 );

  CHECK( verify_adder( kogge_stone_graph( 10 ) ).vectors == ( 1u << 20 ) );
  CHECK( verify_adder( brent_kung_graph( 256 ), { 10, 5000, 9 } ).ok );

  // A structurally broken graph reports its violations.
  auto bad = serial_graph( 8 );
  bad.add_node( { 5, 0 }, { 5, 4 }, { 3, 0 } );
  auto const broken = verify_adder( bad );
  CHECK_FALSE( broken.ok );
  CHECK( contains( broken.message, "(5,0)" ) );

  // A netlist with a wrong gate is caught with operands.
  auto text = emit_verilog( serial_graph( 6 ) );
  auto const at = text.find( "xor (s[3]" );
  REQUIRE( at != std::string::npos );
  text.replace( at, 3, "or " );
  auto const v = verify_netlist( Netlist::parse( text ) );
  CHECK_FALSE( v.ok );
  CHECK( contains( v.message, "mismatch at a=0b" ) );
}
