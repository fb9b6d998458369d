#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "outcome.hpp"
#include "prefix_graph.hpp"
#include "timing.hpp"

namespace prefixopt
{

/// The MSB-carry cone of an N-bit prefix adder: a full binary tree over the
/// leaves 0..N-1 whose N-1 internal nodes are prefix nodes rooted at (N-1,0).
///
/// Internal nodes with lsb 0 form the ridge: the root and its chain of lower
/// parents. Regroups are rotations at ridge nodes.
class Backbone
{
public:
  /// Fully serial backbone (m,0) = (m,m) o (m-1,0). Throws for width < 2.
  static Backbone serial( int width );

  /// Checks every backbone invariant before constructing.
  static Outcome<Backbone> from_nodes( int width, std::map<NodeId, Parents> nodes );

  /// MSB cone of a prefix graph, if it forms a valid backbone.
  static Outcome<Backbone> from_graph( PrefixGraph const& graph );

  int width() const { return width_; }
  NodeId root() const { return { width_ - 1, 0 }; }

  /// Internal nodes with their parents.
  std::map<NodeId, Parents> const& nodes() const { return nodes_; }
  std::set<NodeId> node_set() const;
  bool contains( NodeId const& id ) const { return nodes_.count( id ) != 0; }
  /// Parents of an internal node; nullopt for leaves and unknown ids.
  std::optional<Parents> parents( NodeId const& id ) const;
  /// Tree level of an internal node or leaf (leaves are 0).
  int level( NodeId const& id ) const;
  /// L_B.
  int root_level() const { return level( root() ); }

  /// Inputs plus backbone nodes as a (generally incomplete) prefix graph.
  PrefixGraph to_graph() const;

  bool operator==( Backbone const& other ) const { return width_ == other.width_ && nodes_ == other.nodes_; }

private:
  Backbone( int width, std::map<NodeId, Parents> nodes );

  int width_ = 0;
  std::map<NodeId, Parents> nodes_;
  std::map<NodeId, int> levels_;
};

struct RegroupCandidate
{
  NodeId a;
  NodeId b;

  bool operator==( RegroupCandidate const& ) const = default;
};

std::string to_string( RegroupCandidate const& c );

/// Regroup pairs, scanning columns from N-1 down to 1. For a ridge node
/// (i,0) whose lower parent (k-1,0) is not a leaf, a is the upper parent of
/// (i,0) (the minimal-lsb node of column i with lsb > 0) and b the upper
/// parent of (k-1,0). Columns without such a pair are skipped.
std::vector<RegroupCandidate> find_candidates( Backbone const& backbone );

/// Rotation at ridge node (a.msb,0): adds (a.msb,b.lsb) = a o b, removes
/// (b.msb,0) and re-parents (a.msb,0) onto (a.msb,b.lsb) and (b.lsb-1,0).
/// Rejected, with the broken condition named, unless (a,b) is a candidate.
Outcome<Backbone> regroup( Backbone const& backbone, NodeId const& a, NodeId const& b );

/// Backbone cost: leaves carry their arrival, internal nodes add
/// d + lambda to the later child.
std::map<NodeId, double> backbone_arrivals( Backbone const& backbone, ArrivalProfile const& profile, DelayModel const& model );
double backbone_cost( Backbone const& backbone, ArrivalProfile const& profile, DelayModel const& model );

/// Nested "group(...)" rendering with "[arrival=x.xxxx]" on every node,
/// higher-significance child first.
std::string to_timed_sexpr( Backbone const& backbone, ArrivalProfile const& profile, DelayModel const& model );

/// Adds an output (i,0) for every bit that lacks one, ascending in i:
/// (i,0) = a_i o (k-1,0) where a_i is the minimal-lsb node (i,k) already
/// present. Inserts N-1-R nodes for a ridge of R nodes; R equals L_B only
/// when the deepest root-to-leaf chain runs along the ridge.
PrefixGraph complete( Backbone const& backbone );

struct BackboneStats
{
  int size = 0;   // S_B, always N-1
  int level = 0;  // L_B
  int ridge = 0;  // backbone nodes with lsb 0
};

BackboneStats backbone_stats( Backbone const& backbone );

} // namespace prefixopt
