#include "prefixopt/verify.hpp"

#include <bit>
#include <random>

#include <fmt/format.h>

namespace prefixopt
{

namespace
{

struct Lanes
{
  std::vector<std::uint64_t> a;
  std::vector<std::uint64_t> b;
};

/// Lane-wise ripple-carry addition.
std::pair<std::vector<std::uint64_t>, std::uint64_t> ripple( Lanes const& in )
{
  std::vector<std::uint64_t> sum( in.a.size() );
  std::uint64_t carry = 0;
  for ( std::size_t i = 0; i < in.a.size(); ++i )
  {
    sum[i] = in.a[i] ^ in.b[i] ^ carry;
    carry = ( in.a[i] & in.b[i] ) | ( carry & ( in.a[i] ^ in.b[i] ) );
  }
  return { sum, carry };
}

std::string operands( Lanes const& in, int lane )
{
  std::string a, b;
  for ( auto i = in.a.size(); i-- > 0; )
  {
    a += ( in.a[i] >> lane & 1 ) ? '1' : '0';
    b += ( in.b[i] >> lane & 1 ) ? '1' : '0';
  }
  return fmt::format( "a=0b{} b=0b{}", a, b );
}

/// Runs `eval` on batches of 64 operand pairs until a mismatch.
template<typename Eval>
VerifyResult run( int width, VerifyOptions const& options, Eval&& eval )
{
  VerifyResult result;
  auto const w = static_cast<std::size_t>( width );
  auto check = [&]( Lanes const& in, std::uint64_t active ) {
    auto const [sum, cout] = eval( in );
    auto const [ref_sum, ref_cout] = ripple( in );
    std::uint64_t bad = ( cout ^ ref_cout ) & active;
    for ( std::size_t i = 0; i < w; ++i )
      bad |= ( sum[i] ^ ref_sum[i] ) & active;
    if ( bad )
    {
      int lane = 0;
      while ( !( bad >> lane & 1 ) )
        ++lane;
      result.message = "mismatch at " + operands( in, lane );
      return false;
    }
    return true;
  };

  if ( width <= options.exhaustive_limit && 2 * width < 64 )
  {
    result.exhaustive = true;
    std::uint64_t const total = std::uint64_t{ 1 } << ( 2 * width );
    for ( std::uint64_t base = 0; base < total; base += 64 )
    {
      Lanes in{ std::vector<std::uint64_t>( w ), std::vector<std::uint64_t>( w ) };
      std::uint64_t active = 0;
      for ( int lane = 0; lane < 64 && base + static_cast<std::uint64_t>( lane ) < total; ++lane )
      {
        auto const v = base + static_cast<std::uint64_t>( lane );
        active |= std::uint64_t{ 1 } << lane;
        for ( std::size_t i = 0; i < w; ++i )
        {
          in.a[i] |= ( v >> i & 1 ) << lane;
          in.b[i] |= ( v >> ( i + w ) & 1 ) << lane;
        }
      }
      if ( !check( in, active ) )
        return result;
      result.vectors += static_cast<std::uint64_t>( std::popcount( active ) );
    }
  }
  else
  {
    std::mt19937_64 rng( options.seed );
    for ( std::uint64_t done = 0; done < options.random_vectors; done += 64 )
    {
      Lanes in{ std::vector<std::uint64_t>( w ), std::vector<std::uint64_t>( w ) };
      for ( std::size_t i = 0; i < w; ++i )
      {
        in.a[i] = rng();
        in.b[i] = rng();
      }
      auto const n = std::min<std::uint64_t>( 64, options.random_vectors - done );
      std::uint64_t const active = n == 64 ? ~std::uint64_t{ 0 } : ( std::uint64_t{ 1 } << n ) - 1;
      if ( !check( in, active ) )
        return result;
      result.vectors += n;
    }
  }
  result.ok = true;
  return result;
}

} // namespace

VerifyResult verify_adder( PrefixGraph const& graph, VerifyOptions const& options )
{
  if ( auto const report = validate( graph ); !report.ok() )
    return { false, false, 0, report.to_string() };
  if ( !graph.is_complete() )
    return { false, false, 0, "graph is missing output nodes" };
  return run( graph.width(), options, [&]( Lanes const& in ) {
    auto const out = simulate_sliced( graph, in.a, in.b );
    return std::pair{ out.sum, out.cout };
  } );
}

VerifyResult verify_netlist( Netlist const& netlist, VerifyOptions const& options )
{
  int const width = netlist.port_width( "a" );
  if ( netlist.port_width( "b" ) != width || netlist.port_width( "s" ) != width || netlist.port_width( "cout" ) != 1 )
    return { false, false, 0, "netlist ports do not form an adder" };
  return run( width, options, [&]( Lanes const& in ) {
    auto const out = evaluate_adder( netlist, in.a, in.b );
    return std::pair{ out.sum, out.cout };
  } );
}

} // namespace prefixopt
