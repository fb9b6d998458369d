#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "node_id.hpp"

namespace prefixopt
{

/// Upper parent (msb,k) and lower parent (k-1,lsb) of a non-input node.
struct Parents
{
  NodeId up;
  NodeId lp;

  bool operator==( Parents const& ) const = default;
};

/// Prefix DAG over `width` bits.
///
/// The node set and parent links are the state; levels and tf/ntf fanout
/// lists are caches rebuilt after every mutation. Mutators do not enforce
/// structural rules so that malformed graphs can be built and reported by
/// `validate`.
class PrefixGraph
{
public:
  /// Graph holding the `width` input nodes and nothing else.
  explicit PrefixGraph( int width );

  /// Graph with no nodes at all.
  static PrefixGraph without_inputs( int width );

  int width() const { return width_; }

  /// Number of non-input nodes (s_C).
  std::size_t size() const { return size_; }
  /// Maximum level over all nodes (d_C).
  int depth() const { return depth_; }
  int max_fanout() const { return max_fanout_; }

  bool contains( NodeId const& id ) const { return nodes_.count( id ) != 0; }
  std::optional<Parents> parents( NodeId const& id ) const;
  /// Level of `id`; -1 when it cannot be derived (missing ancestor or cycle).
  int level( NodeId const& id ) const;
  std::vector<NodeId> const& tf( NodeId const& id ) const;
  std::vector<NodeId> const& ntf( NodeId const& id ) const;
  int fanout( NodeId const& id ) const { return static_cast<int>( tf( id ).size() + ntf( id ).size() ); }
  /// tf followed by ntf, each ascending.
  std::vector<NodeId> consumers( NodeId const& id ) const;

  /// All nodes, ascending by (msb, lsb, instance).
  std::vector<NodeId> nodes() const;
  std::vector<NodeId> inputs() const;
  std::vector<NodeId> non_inputs() const;

  /// Bits i >= 1 that lack an output node (i,0).
  std::vector<int> missing_outputs() const;
  bool is_complete() const { return missing_outputs().empty(); }

  /// Next unused clone instance for the range of `id`.
  int next_instance( NodeId const& id ) const;

  void add_input( int bit );
  /// Inserts `id` or replaces its parents.
  void add_node( NodeId const& id, NodeId const& up, NodeId const& lp );
  void set_parents( NodeId const& id, Parents const& parents ) { add_node( id, parents.up, parents.lp ); }
  void remove_node( NodeId const& id );

  /// Structural equality: width, node set and parent links.
  bool operator==( PrefixGraph const& other ) const;

private:
  struct Entry
  {
    std::optional<Parents> parents;
    int level = 0;
    std::vector<NodeId> tf;
    std::vector<NodeId> ntf;
  };

  void refresh();

  int width_ = 0;
  std::map<NodeId, Entry> nodes_;
  std::size_t size_ = 0;
  int depth_ = 0;
  int max_fanout_ = 0;
};

struct Violation
{
  NodeId node;
  std::string rule;
};

struct ValidityReport
{
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  /// One "node: rule" line per violation.
  std::string to_string() const;
};

ValidityReport validate( PrefixGraph const& graph );

struct AddResult
{
  std::uint64_t sum = 0;
  bool cout = false;
};

/// Evaluates the adder on one operand pair. Requires width <= 64 and a
/// complete graph; throws std::invalid_argument naming the first bit that
/// has no output node.
AddResult simulate( PrefixGraph const& graph, std::uint64_t a, std::uint64_t b );

/// Bit-sliced evaluation of 64 operand pairs at once: `a[i]` holds bit i of
/// each of the 64 lanes. Works for any width.
struct SlicedSum
{
  std::vector<std::uint64_t> sum;
  std::uint64_t cout = 0;
};
SlicedSum simulate_sliced( PrefixGraph const& graph, std::span<std::uint64_t const> a, std::span<std::uint64_t const> b );

/// size + depth - (2N - 2).
int deficiency( PrefixGraph const& graph );

} // namespace prefixopt
