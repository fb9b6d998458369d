#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "backbone.hpp"
#include "timing.hpp"

namespace prefixopt
{

/// A BackboneLang term: leaves `iK` and the binary group operator `o`.
///
/// Operands are written lower-significance first, `(o i0 i1)`, while prefix
/// nodes name the upper parent first; `to_backbone`/`from_backbone` map
/// between the two. Children of an `o` always cover adjacent bit ranges.
class BackboneExpr
{
public:
  struct Node
  {
    int lsb = 0;
    int msb = 0;
    int lower = -1;   // index of the lower-significance operand
    int higher = -1;  // index of the higher-significance operand

    bool is_leaf() const { return lower < 0; }
  };

  static BackboneExpr leaf( int bit );
  /// Throws std::invalid_argument unless `higher` starts right above `lower`.
  static BackboneExpr op( BackboneExpr const& lower, BackboneExpr const& higher );
  /// Left-deep chain (((i0 o i1) o i2) ...), the serial backbone.
  static BackboneExpr serial( int width );

  static BackboneExpr from_backbone( Backbone const& backbone );
  Backbone to_backbone() const;

  /// Parses "(o x y)" terms; leaves must be i0..iN-1 in order.
  static BackboneExpr parse( std::string_view text );
  std::string to_string() const;

  int width() const { return root_node().msb - root_node().lsb + 1; }
  int lsb() const { return root_node().lsb; }
  int msb() const { return root_node().msb; }
  std::vector<Node> const& nodes() const { return nodes_; }
  int root() const { return root_; }
  Node const& root_node() const { return nodes_[static_cast<std::size_t>( root_ )]; }

  /// Cost of the root under the linear delay model.
  double cost( ArrivalProfile const& profile, DelayModel const& model ) const;

  bool operator==( BackboneExpr const& other ) const { return to_string() == other.to_string(); }

private:
  int append( BackboneExpr const& sub );

  std::vector<Node> nodes_;
  int root_ = 0;
};

double backbone_cost( BackboneExpr const& expr, ArrivalProfile const& profile, DelayModel const& model );

} // namespace prefixopt
