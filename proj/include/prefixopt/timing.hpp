#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "prefix_graph.hpp"

namespace prefixopt
{

/// Linear delay model y = k*x + b where x counts nodes on a path.
///
/// The per-node step is d + lambda and is kept equal to k. Backbone nodes
/// all have fanout one; the full-graph analysis adds `fanout_beta` per extra
/// consumer of the driving node.
struct DelayModel
{
  double slope_k = 0.035;
  double intercept_b = 0.0;
  double node_delay_d = 0.030;
  double margin_lambda = 0.005;
  double fanout_beta = 0.005;

  double step() const { return node_delay_d + margin_lambda; }

  /// Sets k and moves d so that d + lambda == k.
  DelayModel& with_slope( double k );
  /// Sets d and keeps k == d + lambda.
  DelayModel& with_node_delay( double d );
  /// Sets lambda and keeps k == d + lambda.
  DelayModel& with_margin( double lambda );

  /// Throws std::invalid_argument on negative parameters or k != d + lambda.
  void check() const;
};

/// Input arrival time per bit, in ns.
class ArrivalProfile
{
public:
  ArrivalProfile() = default;
  explicit ArrivalProfile( std::vector<double> arrivals );

  static ArrivalProfile uniform( int width, double arrival = 0.0 );
  /// Lower half arrives at 0, upper half at `offset`.
  static ArrivalProfile lsb_first( int width, double offset );
  /// Uniform draws from [0, max_arrival] under `seed`.
  static ArrivalProfile random( int width, std::uint64_t seed, double max_arrival );

  /// Text form: one "bit, arrival" pair per line; '#' starts a comment.
  static ArrivalProfile parse( std::string_view text );
  std::string to_text() const;

  int width() const { return static_cast<int>( arrivals_.size() ); }
  double operator[]( int bit ) const { return arrivals_.at( static_cast<std::size_t>( bit ) ); }
  std::vector<double> const& values() const { return arrivals_; }

  bool operator==( ArrivalProfile const& ) const = default;

private:
  std::vector<double> arrivals_;
};

struct TimingReport
{
  std::map<NodeId, double> arrival;
  DelayModel model;
  double target = 0.0;
  /// Worst output arrival plus the model intercept.
  double delay = 0.0;
  double slack = 0.0;
  NodeId critical_start;
  NodeId critical_end;
  /// Non-input node count.
  std::size_t area = 0;

  double at( NodeId const& id ) const { return arrival.at( id ); }
};

/// Arrival contribution of driver `p` at any of its consumers.
double driver_contribution( PrefixGraph const& graph, TimingReport const& report, NodeId const& p );

/// Static timing over a complete, valid graph:
/// arrival(input i) = t_i and
/// arrival(n) = max over parents p of arrival(p) + d + lambda + beta*(fanout(p)-1).
/// Outputs are the carry nodes (i,0). The critical end is the latest output
/// (highest msb on ties); the start is found by walking back through the
/// latest parent, preferring the lower parent on ties.
TimingReport graph_arrivals( PrefixGraph const& graph, ArrivalProfile const& profile, DelayModel const& model, double target = 0.0 );

struct SweepRow
{
  double target = 0.0;
  std::size_t area = 0;
  double delay = 0.0;
  double slack = 0.0;
  std::size_t size = 0;
  int level = 0;
  int deficiency = 0;

  bool operator==( SweepRow const& ) const = default;
};

SweepRow make_row( PrefixGraph const& graph, TimingReport const& report );

/// Runs `synthesize` once per target and evaluates each design. Throws
/// std::invalid_argument on an empty target list; callback errors propagate.
std::vector<SweepRow> pareto_sweep( std::function<PrefixGraph( double target )> const& synthesize, std::vector<double> const& targets,
                                    ArrivalProfile const& profile, DelayModel const& model );

/// Area-delay non-dominated subset, ascending by delay (area descending).
std::vector<SweepRow> pareto_front( std::vector<SweepRow> rows );

} // namespace prefixopt
