#include "prefixopt/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace prefixopt
{

namespace
{

template<typename T>
T get( nlohmann::json const& j, char const* key )
{
  try
  {
    return j.at( key ).get<T>();
  }
  catch ( nlohmann::json::exception const& )
  {
    throw std::invalid_argument( fmt::format( "config: \"{}\" has the wrong type", key ) );
  }
}

} // namespace

DelayModel with_overrides( DelayModel model, std::optional<double> k, std::optional<double> b, std::optional<double> d, std::optional<double> lambda,
                           std::optional<double> beta )
{
  if ( d )
    model.node_delay_d = *d;
  if ( lambda )
    model.margin_lambda = *lambda;
  if ( k && !d && !lambda )
    model.with_slope( *k );
  else if ( k )
    model.slope_k = *k;  // all given: check() reports a mismatch
  else
    model.slope_k = model.step();
  if ( b )
    model.intercept_b = *b;
  if ( beta )
    model.fanout_beta = *beta;
  return model;
}

RunConfig config_from_json( nlohmann::json const& j )
{
  if ( !j.is_object() )
    throw std::invalid_argument( "config must be a JSON object" );
  static std::set<std::string> const known{ "width",  "profile",       "seed",    "lsb_offset", "target",    "max_iterations", "policy", "model",
                                            "out",    "verilog_style", "samples", "eps_scale",  "threshold", "targets",        "input",  "remote" };
  for ( auto const& [key, value] : j.items() )
    if ( !known.count( key ) )
      throw std::invalid_argument( fmt::format( "config: unknown key \"{}\"", key ) );

  RunConfig c;
  if ( j.contains( "width" ) )
    c.width = get<int>( j, "width" );
  if ( j.contains( "profile" ) )
    c.profile = get<std::string>( j, "profile" );
  if ( j.contains( "seed" ) )
    c.seed = get<std::uint64_t>( j, "seed" );
  if ( j.contains( "lsb_offset" ) )
    c.lsb_offset = get<double>( j, "lsb_offset" );
  if ( j.contains( "target" ) )
    c.target = get<double>( j, "target" );
  if ( j.contains( "max_iterations" ) )
    c.max_iterations = get<int>( j, "max_iterations" );
  if ( j.contains( "policy" ) )
    c.policy = get<std::string>( j, "policy" );
  if ( j.contains( "model" ) )
  {
    auto const& m = j["model"];
    if ( !m.is_object() )
      throw std::invalid_argument( "config: \"model\" must be an object" );
    auto opt = [&]( char const* key ) -> std::optional<double> {
      if ( !m.contains( key ) )
        return std::nullopt;
      return get<double>( m, key );
    };
    for ( auto const& [key, value] : m.items() )
      if ( key != "k" && key != "b" && key != "d" && key != "lambda" && key != "beta" )
        throw std::invalid_argument( fmt::format( "config: unknown model key \"{}\"", key ) );
    c.model = with_overrides( c.model, opt( "k" ), opt( "b" ), opt( "d" ), opt( "lambda" ), opt( "beta" ) );
  }
  if ( j.contains( "out" ) )
    c.out = get<std::string>( j, "out" );
  if ( j.contains( "verilog_style" ) )
    c.verilog_style = get<std::string>( j, "verilog_style" );
  if ( j.contains( "samples" ) )
    c.samples = get<int>( j, "samples" );
  if ( j.contains( "eps_scale" ) )
    c.eps_scale = get<double>( j, "eps_scale" );
  if ( j.contains( "threshold" ) )
    c.threshold = get<int>( j, "threshold" );
  if ( j.contains( "targets" ) )
    c.targets = get<std::vector<double>>( j, "targets" );
  if ( j.contains( "input" ) )
    c.input = get<std::string>( j, "input" );
  if ( j.contains( "remote" ) )
    c.remote = remote_config_from_json( j["remote"] );
  return c;
}

nlohmann::json to_json( RunConfig const& c )
{
  nlohmann::json j{ { "width", c.width },
                    { "profile", c.profile },
                    { "seed", c.seed },
                    { "target", c.target },
                    { "max_iterations", c.max_iterations },
                    { "policy", c.policy },
                    { "model", { { "k", c.model.slope_k }, { "b", c.model.intercept_b }, { "d", c.model.node_delay_d }, { "lambda", c.model.margin_lambda }, { "beta", c.model.fanout_beta } } },
                    { "out", c.out },
                    { "verilog_style", c.verilog_style },
                    { "samples", c.samples },
                    { "eps_scale", c.eps_scale },
                    { "threshold", c.threshold },
                    { "targets", c.targets },
                    { "input", c.input } };
  if ( c.lsb_offset )
    j["lsb_offset"] = *c.lsb_offset;
  if ( c.remote )
    j["remote"] = { { "endpoint", c.remote->endpoint },
                    { "model", c.remote->model },
                    { "api_key_env", c.remote->api_key_env },
                    { "timeout_seconds", c.remote->timeout_seconds },
                    { "max_attempts", c.remote->max_attempts } };
  return j;
}

void check( RunConfig const& c )
{
  if ( c.width < 2 || c.width > 256 )
    throw std::invalid_argument( fmt::format( "bit width {} is outside [2, 256]", c.width ) );
  if ( c.max_iterations < 1 )
    throw std::invalid_argument( "max iterations must be at least 1" );
  c.model.check();
  if ( c.policy != "greedy" && c.policy != "remote" && c.policy.rfind( "scripted:", 0 ) != 0 )
    throw std::invalid_argument( fmt::format( "unknown policy \"{}\" (greedy, scripted:<path> or remote)", c.policy ) );
  if ( c.policy == "remote" && !c.remote )
    throw std::invalid_argument( "the remote policy needs a \"remote\" section in the config file" );
  if ( c.verilog_style != "plain" && c.verilog_style != "inverting" )
    throw std::invalid_argument( fmt::format( "unknown Verilog style \"{}\"", c.verilog_style ) );
  if ( c.samples < 0 )
    throw std::invalid_argument( "sample count must be non-negative" );
  if ( c.eps_scale < 0 )
    throw std::invalid_argument( "eps scale must be non-negative" );
  if ( c.threshold < 0 )
    throw std::invalid_argument( "threshold must be non-negative" );
  if ( c.lsb_offset && *c.lsb_offset < 0 )
    throw std::invalid_argument( "lsb-first offset must be non-negative" );
}

ArrivalProfile make_profile( RunConfig const& c )
{
  double const step = c.model.step();
  if ( c.profile == "uniform" )
    return ArrivalProfile::uniform( c.width );
  if ( c.profile == "lsb-first" )
    return ArrivalProfile::lsb_first( c.width, c.lsb_offset.value_or( 4 * step ) );
  if ( c.profile == "random" )
    return ArrivalProfile::random( c.width, c.seed, c.width / 8.0 * step );
  std::ifstream in( c.profile );
  if ( !in )
    throw std::invalid_argument( fmt::format( "profile \"{}\" is neither a preset nor a readable file", c.profile ) );
  std::stringstream text;
  text << in.rdbuf();
  auto profile = ArrivalProfile::parse( text.str() );
  if ( profile.width() != c.width )
    throw std::invalid_argument( fmt::format( "profile file has {} bits, expected {}", profile.width(), c.width ) );
  return profile;
}

} // namespace prefixopt
