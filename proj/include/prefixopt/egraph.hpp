#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "backbone_expr.hpp"
#include "timing.hpp"

namespace prefixopt
{

using ClassId = std::uint32_t;

/// Either Leaf(bit) or Op(lower, higher) over e-class ids.
struct ENode
{
  int leaf = -1;
  ClassId lower = 0;
  ClassId higher = 0;

  static ENode make_leaf( int bit ) { return { bit, 0, 0 }; }
  static ENode make_op( ClassId lower, ClassId higher ) { return { -1, lower, higher }; }
  bool is_leaf() const { return leaf >= 0; }

  auto operator<=>( ENode const& ) const = default;
};

struct ENodeHash
{
  std::size_t operator()( ENode const& n ) const noexcept
  {
    std::uint64_t h = static_cast<std::uint64_t>( static_cast<std::uint32_t>( n.leaf ) );
    h = h * 0x9E3779B97F4A7C15ull ^ n.lower;
    h = h * 0x9E3779B97F4A7C15ull ^ n.higher;
    return static_cast<std::size_t>( h ^ ( h >> 29 ) );
  }
};

/// E-graph over BackboneLang with hashconsing and deferred congruence
/// repair. Each e-class carries the bit range it covers; merging classes of
/// different ranges is a logic error since associativity preserves ranges.
class EGraph
{
public:
  ClassId add( ENode node );
  ClassId add_expr( BackboneExpr const& expr );

  /// Returns true when two distinct classes were unified.
  bool merge( ClassId a, ClassId b );
  /// Restores congruence closure and canonical node lists.
  void rebuild();

  ClassId find( ClassId id ) const;
  ClassId find( ClassId id );

  std::size_t class_count() const { return live_classes_; }
  std::size_t node_count() const { return memo_.size(); }
  /// Canonical class ids, ascending.
  std::vector<ClassId> classes() const;
  /// Canonical e-nodes of a class (valid after `rebuild`).
  std::vector<ENode> const& nodes( ClassId id ) const;
  int lsb( ClassId id ) const { return data( id ).lsb; }
  int msb( ClassId id ) const { return data( id ).msb; }
  /// Class holding `node`, if present.
  std::optional<ClassId> lookup( ENode node ) const;

private:
  struct EClass
  {
    std::vector<ENode> nodes;
    std::vector<std::pair<ENode, ClassId>> parents;
    int lsb = 0;
    int msb = 0;
  };

  ENode canonical( ENode node ) const;
  EClass const& data( ClassId id ) const { return classes_[find( id )]; }
  void repair( ClassId id );

  mutable std::vector<ClassId> union_find_;
  std::vector<EClass> classes_;
  std::unordered_map<ENode, ClassId, ENodeHash> memo_;
  std::vector<ClassId> pending_;
  std::size_t live_classes_ = 0;
};

struct SaturationLimits
{
  int max_iterations = 64;
  std::size_t max_nodes = 500000;
};

struct Saturation
{
  EGraph graph;
  ClassId root = 0;
  int width = 0;
  bool saturated = false;
  int iterations = 0;
};

/// Equality saturation under associativity,
/// (o (o x y) z) <=> (o x (o y z)), applied in both directions until no
/// rewrite changes the e-graph or a limit is hit.
Saturation saturate( BackboneExpr const& expr, SaturationLimits const& limits = {} );

/// Number of distinct terms represented by `id`.
boost::multiprecision::cpp_int count_terms( EGraph const& graph, ClassId id );

/// Every term of `id`, up to `limit` of them.
std::vector<BackboneExpr> enumerate_terms( EGraph const& graph, ClassId id, std::size_t limit = 1u << 20 );

struct Extraction
{
  BackboneExpr expr = BackboneExpr::leaf( 0 );
  /// Linear-model cost of `expr` itself (without perturbation).
  double cost = 0.0;
  /// Set when extracting from an e-graph that hit a saturation limit.
  std::string warning;
};

/// Bottom-up extraction minimizing the backbone cost. Ties prefer the node
/// whose higher-significance child is cheaper, then the smaller split bit.
Extraction extract_optimal( Saturation const& sat, ArrivalProfile const& profile, DelayModel const& model );

/// Same dynamic program with independent noise drawn uniformly from
/// [0, eps_scale*(d+lambda)] added to every operator node. eps_scale = 0
/// gives `extract_optimal`.
Extraction extract_perturbed( Saturation const& sat, ArrivalProfile const& profile, DelayModel const& model, std::uint64_t seed, double eps_scale );

/// Catalan number C_n.
boost::multiprecision::cpp_int catalan( unsigned n );

/// log10 of the number of prefix graphs (product of C_1..C_{N-1}) and of
/// backbones (C_{N-1}) for an N-bit adder.
struct DesignSpace
{
  double full_log10 = 0.0;
  double backbone_log10 = 0.0;
};
DesignSpace design_space( int width );

} // namespace prefixopt
