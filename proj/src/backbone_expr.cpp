#include "prefixopt/backbone_expr.hpp"

#include <cctype>
#include <stdexcept>

#include <fmt/format.h>

namespace prefixopt
{

BackboneExpr BackboneExpr::leaf( int bit )
{
  if ( bit < 0 )
    throw std::invalid_argument( "leaf bit must be non-negative" );
  BackboneExpr e;
  e.nodes_.push_back( { bit, bit, -1, -1 } );
  e.root_ = 0;
  return e;
}

int BackboneExpr::append( BackboneExpr const& sub )
{
  int const offset = static_cast<int>( nodes_.size() );
  for ( auto n : sub.nodes_ )
  {
    if ( !n.is_leaf() )
    {
      n.lower += offset;
      n.higher += offset;
    }
    nodes_.push_back( n );
  }
  return sub.root_ + offset;
}

BackboneExpr BackboneExpr::op( BackboneExpr const& lower, BackboneExpr const& higher )
{
  if ( higher.lsb() != lower.msb() + 1 )
    throw std::invalid_argument( fmt::format( "operands [{}..{}] and [{}..{}] are not adjacent", lower.lsb(), lower.msb(), higher.lsb(), higher.msb() ) );
  BackboneExpr e;
  int const lo = e.append( lower );
  int const hi = e.append( higher );
  e.nodes_.push_back( { lower.lsb(), higher.msb(), lo, hi } );
  e.root_ = static_cast<int>( e.nodes_.size() ) - 1;
  return e;
}

BackboneExpr BackboneExpr::serial( int width )
{
  if ( width < 1 )
    throw std::invalid_argument( "width must be positive" );
  auto e = leaf( 0 );
  for ( int i = 1; i < width; ++i )
    e = op( e, leaf( i ) );
  return e;
}

namespace
{

BackboneExpr build_from( Backbone const& backbone, NodeId const& id )
{
  auto const p = backbone.parents( id );
  if ( !p )
    return BackboneExpr::leaf( id.msb );
  return BackboneExpr::op( build_from( backbone, p->lp ), build_from( backbone, p->up ) );
}

} // namespace

BackboneExpr BackboneExpr::from_backbone( Backbone const& backbone )
{
  return build_from( backbone, backbone.root() );
}

Backbone BackboneExpr::to_backbone() const
{
  if ( lsb() != 0 )
    throw std::invalid_argument( "backbone expressions must start at bit 0" );
  std::map<NodeId, Parents> nodes;
  for ( auto const& n : nodes_ )
  {
    if ( n.is_leaf() )
      continue;
    auto const& lo = nodes_[static_cast<std::size_t>( n.lower )];
    auto const& hi = nodes_[static_cast<std::size_t>( n.higher )];
    nodes.emplace( NodeId{ n.msb, n.lsb }, Parents{ { hi.msb, hi.lsb }, { lo.msb, lo.lsb } } );
  }
  return Backbone::from_nodes( width(), std::move( nodes ) ).value();
}

namespace
{

class Parser
{
public:
  explicit Parser( std::string_view text ) : text_( text ) {}

  BackboneExpr parse_all()
  {
    auto e = term();
    skip();
    if ( pos_ != text_.size() )
      fail( "trailing input" );
    if ( e.lsb() != 0 )
      fail( "leaves must start at i0" );
    return e;
  }

private:
  BackboneExpr term()
  {
    skip();
    if ( pos_ >= text_.size() )
      fail( "unexpected end of input" );
    if ( text_[pos_] == '(' )
    {
      ++pos_;
      skip();
      if ( pos_ >= text_.size() || text_[pos_] != 'o' )
        fail( "expected operator 'o'" );
      ++pos_;
      auto lower = term();
      auto higher = term();
      skip();
      if ( pos_ >= text_.size() || text_[pos_] != ')' )
        fail( "expected ')'" );
      ++pos_;
      if ( higher.lsb() != lower.msb() + 1 )
        fail( "operands are not adjacent bit ranges" );
      return BackboneExpr::op( lower, higher );
    }
    if ( text_[pos_] != 'i' )
      fail( "expected leaf iN or '('" );
    ++pos_;
    std::size_t const start = pos_;
    while ( pos_ < text_.size() && std::isdigit( static_cast<unsigned char>( text_[pos_] ) ) )
      ++pos_;
    if ( start == pos_ )
      fail( "leaf without bit index" );
    return BackboneExpr::leaf( std::stoi( std::string( text_.substr( start, pos_ - start ) ) ) );
  }

  void skip()
  {
    while ( pos_ < text_.size() && std::isspace( static_cast<unsigned char>( text_[pos_] ) ) )
      ++pos_;
  }

  [[noreturn]] void fail( std::string const& what ) const
  {
    throw std::invalid_argument( fmt::format( "BackboneLang offset {}: {}", pos_, what ) );
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void print( BackboneExpr const& e, int idx, std::string& out )
{
  auto const& n = e.nodes()[static_cast<std::size_t>( idx )];
  if ( n.is_leaf() )
  {
    out += fmt::format( "i{}", n.lsb );
    return;
  }
  out += "(o ";
  print( e, n.lower, out );
  out += ' ';
  print( e, n.higher, out );
  out += ')';
}

} // namespace

BackboneExpr BackboneExpr::parse( std::string_view text )
{
  return Parser( text ).parse_all();
}

std::string BackboneExpr::to_string() const
{
  std::string out;
  print( *this, root_, out );
  return out;
}

double BackboneExpr::cost( ArrivalProfile const& profile, DelayModel const& model ) const
{
  if ( profile.width() <= msb() )
    throw std::invalid_argument( "arrival profile does not cover every leaf" );
  // Children are appended before their parent, so one forward pass suffices.
  std::vector<double> c( nodes_.size() );
  for ( std::size_t i = 0; i < nodes_.size(); ++i )
  {
    auto const& n = nodes_[i];
    c[i] = n.is_leaf() ? profile[n.lsb]
                       : std::max( c[static_cast<std::size_t>( n.lower )], c[static_cast<std::size_t>( n.higher )] ) + model.step();
  }
  return c[static_cast<std::size_t>( root_ )];
}

double backbone_cost( BackboneExpr const& expr, ArrivalProfile const& profile, DelayModel const& model )
{
  return expr.cost( profile, model );
}

} // namespace prefixopt
