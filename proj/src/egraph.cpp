#include "prefixopt/egraph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

namespace prefixopt
{

ClassId EGraph::find( ClassId id ) const
{
  while ( union_find_[id] != id )
    id = union_find_[id];
  return id;
}

ClassId EGraph::find( ClassId id )
{
  ClassId root = id;
  while ( union_find_[root] != root )
    root = union_find_[root];
  while ( union_find_[id] != root )
  {
    auto const next = union_find_[id];
    union_find_[id] = root;
    id = next;
  }
  return root;
}

ENode EGraph::canonical( ENode node ) const
{
  if ( !node.is_leaf() )
  {
    node.lower = find( node.lower );
    node.higher = find( node.higher );
  }
  return node;
}

std::optional<ClassId> EGraph::lookup( ENode node ) const
{
  auto it = memo_.find( canonical( node ) );
  if ( it == memo_.end() )
    return std::nullopt;
  return find( it->second );
}

ClassId EGraph::add( ENode node )
{
  node = canonical( node );
  if ( auto it = memo_.find( node ); it != memo_.end() )
    return find( it->second );

  EClass cls;
  if ( node.is_leaf() )
  {
    cls.lsb = cls.msb = node.leaf;
  }
  else
  {
    auto const& lo = data( node.lower );
    auto const& hi = data( node.higher );
    if ( lo.msb + 1 != hi.lsb )
      throw std::invalid_argument( fmt::format( "o over non-adjacent ranges [{}..{}] and [{}..{}]", lo.lsb, lo.msb, hi.lsb, hi.msb ) );
    cls.lsb = lo.lsb;
    cls.msb = hi.msb;
  }
  cls.nodes.push_back( node );

  auto const id = static_cast<ClassId>( classes_.size() );
  classes_.push_back( std::move( cls ) );
  union_find_.push_back( id );
  if ( !node.is_leaf() )
  {
    classes_[node.lower].parents.emplace_back( node, id );
    if ( node.higher != node.lower )
      classes_[node.higher].parents.emplace_back( node, id );
  }
  memo_.emplace( node, id );
  ++live_classes_;
  return id;
}

ClassId EGraph::add_expr( BackboneExpr const& expr )
{
  std::vector<ClassId> ids( expr.nodes().size() );
  for ( std::size_t i = 0; i < expr.nodes().size(); ++i )
  {
    auto const& n = expr.nodes()[i];
    ids[i] = n.is_leaf() ? add( ENode::make_leaf( n.lsb ) )
                         : add( ENode::make_op( ids[static_cast<std::size_t>( n.lower )], ids[static_cast<std::size_t>( n.higher )] ) );
  }
  return ids[static_cast<std::size_t>( expr.root() )];
}

bool EGraph::merge( ClassId a, ClassId b )
{
  a = find( a );
  b = find( b );
  if ( a == b )
    return false;
  if ( classes_[a].lsb != classes_[b].lsb || classes_[a].msb != classes_[b].msb )
    throw std::logic_error( fmt::format( "merging e-classes over different ranges [{}..{}] and [{}..{}]", classes_[a].lsb, classes_[a].msb,
                                         classes_[b].lsb, classes_[b].msb ) );
  if ( classes_[a].nodes.size() + classes_[a].parents.size() < classes_[b].nodes.size() + classes_[b].parents.size() )
    std::swap( a, b );
  union_find_[b] = a;
  auto& into = classes_[a];
  auto& from = classes_[b];
  into.nodes.insert( into.nodes.end(), from.nodes.begin(), from.nodes.end() );
  into.parents.insert( into.parents.end(), from.parents.begin(), from.parents.end() );
  from.nodes.clear();
  from.nodes.shrink_to_fit();
  from.parents.clear();
  from.parents.shrink_to_fit();
  pending_.push_back( a );
  --live_classes_;
  return true;
}

void EGraph::repair( ClassId id )
{
  auto parents = std::move( classes_[find( id )].parents );
  classes_[find( id )].parents.clear();

  for ( auto const& [node, cls] : parents )
    memo_.erase( node );
  for ( auto& [node, cls] : parents )
  {
    node = canonical( node );
    auto [it, inserted] = memo_.emplace( node, find( cls ) );
    if ( !inserted )
      merge( it->second, cls );
  }

  std::map<ENode, ClassId> unique;
  for ( auto const& [node, cls] : parents )
  {
    auto const c = canonical( node );
    auto [it, inserted] = unique.emplace( c, find( cls ) );
    if ( !inserted )
      merge( it->second, cls );
  }
  auto& target = classes_[find( id )].parents;
  for ( auto const& [node, cls] : unique )
    target.emplace_back( node, find( cls ) );
}

void EGraph::rebuild()
{
  while ( !pending_.empty() )
  {
    auto todo = std::move( pending_ );
    pending_.clear();
    for ( auto& id : todo )
      id = find( id );
    std::sort( todo.begin(), todo.end() );
    todo.erase( std::unique( todo.begin(), todo.end() ), todo.end() );
    for ( auto const id : todo )
      repair( id );
  }

  // Memo keys are canonical now; rebuild it so every key maps to its root.
  std::unordered_map<ENode, ClassId, ENodeHash> memo;
  memo.reserve( memo_.size() );
  for ( auto const& [node, cls] : memo_ )
    memo.emplace( canonical( node ), find( cls ) );
  memo_ = std::move( memo );

  for ( ClassId id = 0; id < classes_.size(); ++id )
  {
    if ( union_find_[id] != id )
      continue;
    auto& nodes = classes_[id].nodes;
    for ( auto& n : nodes )
      n = canonical( n );
    std::sort( nodes.begin(), nodes.end() );
    nodes.erase( std::unique( nodes.begin(), nodes.end() ), nodes.end() );
  }
}

std::vector<ClassId> EGraph::classes() const
{
  std::vector<ClassId> out;
  for ( ClassId id = 0; id < union_find_.size(); ++id )
    if ( union_find_[id] == id )
      out.push_back( id );
  return out;
}

std::vector<ENode> const& EGraph::nodes( ClassId id ) const
{
  return classes_[find( id )].nodes;
}

Saturation saturate( BackboneExpr const& expr, SaturationLimits const& limits )
{
  Saturation sat;
  sat.width = expr.width();
  sat.root = sat.graph.add_expr( expr );
  sat.graph.rebuild();
  auto& eg = sat.graph;

  // One match: class `at` receives the rewritten term built from x, y, z.
  struct Match
  {
    ClassId at;
    bool to_right;  // (o (o x y) z) => (o x (o y z)); otherwise the reverse
    ClassId x, y, z;
  };

  for ( int iter = 1; iter <= limits.max_iterations; ++iter )
  {
    std::vector<Match> matches;
    for ( auto const c : eg.classes() )
    {
      for ( auto const& n : eg.nodes( c ) )
      {
        if ( n.is_leaf() )
          continue;
        for ( auto const& m : eg.nodes( n.lower ) )
          if ( !m.is_leaf() )
            matches.push_back( { c, true, m.lower, m.higher, n.higher } );
        for ( auto const& m : eg.nodes( n.higher ) )
          if ( !m.is_leaf() )
            matches.push_back( { c, false, n.lower, m.lower, m.higher } );
      }
    }

    auto const nodes_before = eg.node_count();
    bool changed = false;
    for ( auto const& m : matches )
    {
      ClassId rewritten;
      if ( m.to_right )
        rewritten = eg.add( ENode::make_op( m.x, eg.add( ENode::make_op( m.y, m.z ) ) ) );
      else
        rewritten = eg.add( ENode::make_op( eg.add( ENode::make_op( m.x, m.y ) ), m.z ) );
      changed = eg.merge( m.at, rewritten ) || changed;
      if ( eg.node_count() > limits.max_nodes )
        break;
    }
    changed = changed || eg.node_count() != nodes_before;
    eg.rebuild();
    sat.iterations = iter;
    if ( !changed )
    {
      sat.saturated = true;
      break;
    }
    if ( eg.node_count() > limits.max_nodes )
      break;
  }
  sat.root = eg.find( sat.root );
  return sat;
}

boost::multiprecision::cpp_int count_terms( EGraph const& graph, ClassId id )
{
  using boost::multiprecision::cpp_int;
  std::map<ClassId, cpp_int> memo;
  std::function<cpp_int( ClassId )> count = [&]( ClassId c ) -> cpp_int {
    c = graph.find( c );
    if ( auto it = memo.find( c ); it != memo.end() )
      return it->second;
    cpp_int total = 0;
    for ( auto const& n : graph.nodes( c ) )
      total += n.is_leaf() ? cpp_int( 1 ) : count( n.lower ) * count( n.higher );
    memo.emplace( c, total );
    return total;
  };
  return count( id );
}

std::vector<BackboneExpr> enumerate_terms( EGraph const& graph, ClassId id, std::size_t limit )
{
  std::map<ClassId, std::vector<BackboneExpr>> memo;
  std::function<std::vector<BackboneExpr> const&( ClassId )> terms = [&]( ClassId c ) -> std::vector<BackboneExpr> const& {
    c = graph.find( c );
    if ( auto it = memo.find( c ); it != memo.end() )
      return it->second;
    std::vector<BackboneExpr> out;
    for ( auto const& n : graph.nodes( c ) )
    {
      if ( n.is_leaf() )
      {
        out.push_back( BackboneExpr::leaf( n.leaf ) );
        continue;
      }
      auto const& lo = terms( n.lower );
      auto const& hi = terms( n.higher );
      for ( auto const& l : lo )
        for ( auto const& h : hi )
          if ( out.size() < limit )
            out.push_back( BackboneExpr::op( l, h ) );
    }
    return memo.emplace( c, std::move( out ) ).first->second;
  };
  return terms( id );
}

namespace
{

std::uint64_t splitmix64( std::uint64_t x )
{
  x += 0x9E3779B97F4A7C15ull;
  x = ( x ^ ( x >> 30 ) ) * 0xBF58476D1CE4E5B9ull;
  x = ( x ^ ( x >> 27 ) ) * 0x94D049BB133111EBull;
  return x ^ ( x >> 31 );
}

/// Noise for the operator node over [lsb..msb] split at `split`, a pure
/// function of the seed and the node's structure so that it does not depend
/// on e-class numbering.
double node_noise( std::uint64_t seed, int lsb, int split, int msb, double scale )
{
  if ( scale <= 0.0 )
    return 0.0;
  auto h = splitmix64( seed );
  h = splitmix64( h ^ static_cast<std::uint64_t>( lsb ) );
  h = splitmix64( h ^ ( static_cast<std::uint64_t>( split ) << 20 ) );
  h = splitmix64( h ^ ( static_cast<std::uint64_t>( msb ) << 40 ) );
  return scale * static_cast<double>( h >> 11 ) * 0x1.0p-53;
}

Extraction extract( Saturation const& sat, ArrivalProfile const& profile, DelayModel const& model, std::uint64_t seed, double noise_scale )
{
  auto const& eg = sat.graph;
  if ( profile.width() < sat.width )
    throw std::invalid_argument( "arrival profile does not cover every leaf" );

  struct Best
  {
    double cost = std::numeric_limits<double>::infinity();
    double higher_cost = std::numeric_limits<double>::infinity();
    int split = std::numeric_limits<int>::max();
    ENode node;
    bool done = false;
  };
  std::map<ClassId, Best> best;

  std::function<Best const&( ClassId )> solve = [&]( ClassId c ) -> Best const& {
    c = eg.find( c );
    if ( auto it = best.find( c ); it != best.end() && it->second.done )
      return it->second;
    Best b;
    for ( auto const& n : eg.nodes( c ) )
    {
      if ( n.is_leaf() )
      {
        double const cost = profile[n.leaf];
        if ( cost < b.cost )
          b = { cost, 0.0, n.leaf, n, false };
        continue;
      }
      double const lo = solve( n.lower ).cost;
      double const hi = solve( n.higher ).cost;
      int const split = eg.lsb( n.higher );
      double const cost = std::max( lo, hi ) + model.step() + node_noise( seed, eg.lsb( c ), split, eg.msb( c ), noise_scale );
      bool const better = cost < b.cost || ( cost == b.cost && ( hi < b.higher_cost || ( hi == b.higher_cost && split < b.split ) ) );
      if ( better )
        b = { cost, hi, split, n, false };
    }
    b.done = true;
    return best[c] = b;
  };
  solve( sat.root );

  std::function<BackboneExpr( ClassId )> build = [&]( ClassId c ) -> BackboneExpr {
    auto const& b = best.at( eg.find( c ) );
    if ( b.node.is_leaf() )
      return BackboneExpr::leaf( b.node.leaf );
    return BackboneExpr::op( build( b.node.lower ), build( b.node.higher ) );
  };

  Extraction out;
  out.expr = build( sat.root );
  out.cost = out.expr.cost( profile, model );
  if ( !sat.saturated )
    out.warning = fmt::format( "e-graph not saturated after {} iterations; extraction covers only the represented terms", sat.iterations );
  return out;
}

} // namespace

Extraction extract_optimal( Saturation const& sat, ArrivalProfile const& profile, DelayModel const& model )
{
  return extract( sat, profile, model, 0, 0.0 );
}

Extraction extract_perturbed( Saturation const& sat, ArrivalProfile const& profile, DelayModel const& model, std::uint64_t seed, double eps_scale )
{
  if ( eps_scale < 0.0 )
    throw std::invalid_argument( "perturbation scale must be non-negative" );
  return extract( sat, profile, model, seed, eps_scale * model.step() );
}

boost::multiprecision::cpp_int catalan( unsigned n )
{
  boost::multiprecision::cpp_int c = 1;
  for ( unsigned k = 0; k < n; ++k )
    c = c * 2 * ( 2 * k + 1 ) / ( k + 2 );
  return c;
}

namespace
{

double log10_of( boost::multiprecision::cpp_int const& value )
{
  auto const digits = value.str();
  std::size_t const head = std::min<std::size_t>( digits.size(), 17 );
  double const mantissa = std::stod( digits.substr( 0, head ) );
  return std::log10( mantissa ) + static_cast<double>( digits.size() - head );
}

} // namespace

DesignSpace design_space( int width )
{
  if ( width < 2 )
    throw std::invalid_argument( "design space needs width >= 2" );
  boost::multiprecision::cpp_int product = 1;
  for ( int i = 1; i < width; ++i )
    product *= catalan( static_cast<unsigned>( i ) );
  return { log10_of( product ), log10_of( catalan( static_cast<unsigned>( width - 1 ) ) ) };
}

} // namespace prefixopt
