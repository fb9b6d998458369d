#include "prefixopt/remote_policy.hpp"

#include <cstdlib>

#include <fmt/format.h>
#include <httplib.h>

namespace prefixopt
{

namespace
{

template<typename T>
T field( nlohmann::json const& j, char const* key, T fallback )
{
  if ( !j.contains( key ) )
    return fallback;
  try
  {
    return j.at( key ).get<T>();
  }
  catch ( nlohmann::json::exception const& )
  {
    throw std::invalid_argument( fmt::format( "remote config: \"{}\" has the wrong type", key ) );
  }
}

std::string tool_names( Phase phase )
{
  std::string out;
  for ( auto const& t : tool_schemas( phase ) )
    out += ( out.empty() ? "" : ", " ) + t["function"]["name"].get<std::string>();
  return out;
}

/// First tool call of the first choice, or the reason there is none.
Outcome<ToolCall> read_call( nlohmann::json const& response, Phase phase )
{
  try
  {
    auto const& message = response.at( "choices" ).at( 0 ).at( "message" );
    if ( !message.contains( "tool_calls" ) || !message["tool_calls"].is_array() || message["tool_calls"].empty() )
      return reject( "the reply contains no tool call" );
    auto const& fn = message["tool_calls"][0].at( "function" );
    auto const name = fn.at( "name" ).get<std::string>();
    nlohmann::json args = nlohmann::json::object();
    if ( fn.contains( "arguments" ) )
    {
      auto const& raw = fn["arguments"];
      args = raw.is_string() ? nlohmann::json::parse( raw.get<std::string>() ) : raw;
    }
    auto call = call_from_function( name, args );
    if ( call && !legal_in( *call, phase ) )
      return reject( fmt::format( "{} is not available in phase {}", name, static_cast<int>( phase ) ) );
    return call;
  }
  catch ( nlohmann::json::exception const& e )
  {
    return reject( fmt::format( "malformed reply: {}", e.what() ) );
  }
}

} // namespace

RemoteConfig remote_config_from_json( nlohmann::json const& j )
{
  if ( !j.is_object() )
    throw std::invalid_argument( "remote config must be a JSON object" );
  RemoteConfig c;
  c.endpoint = field<std::string>( j, "endpoint", "" );
  if ( c.endpoint.empty() )
    throw std::invalid_argument( "remote config: \"endpoint\" is required" );
  c.model = field<std::string>( j, "model", c.model );
  c.api_key_env = field<std::string>( j, "api_key_env", c.api_key_env );
  c.timeout_seconds = field<double>( j, "timeout_seconds", c.timeout_seconds );
  c.max_attempts = field<int>( j, "max_attempts", c.max_attempts );
  if ( c.timeout_seconds <= 0 || c.max_attempts < 1 )
    throw std::invalid_argument( "remote config: timeout_seconds and max_attempts must be positive" );
  return c;
}

RemoteLlmPolicy::RemoteLlmPolicy( RemoteConfig config ) : config_( std::move( config ) )
{
  auto const scheme = config_.endpoint.find( "://" );
  if ( scheme == std::string::npos )
    throw std::invalid_argument( "remote endpoint must start with http:// or https://" );
  auto const slash = config_.endpoint.find( '/', scheme + 3 );
  host_ = config_.endpoint.substr( 0, slash );
  path_ = slash == std::string::npos ? "" : config_.endpoint.substr( slash );
  while ( !path_.empty() && path_.back() == '/' )
    path_.pop_back();
  path_ += "/chat/completions";
}

nlohmann::json RemoteLlmPolicy::post( nlohmann::json const& body )
{
  requests_.push_back( body );
  httplib::Client client( host_ );
  auto const seconds = static_cast<time_t>( config_.timeout_seconds );
  auto const micros = static_cast<time_t>( ( config_.timeout_seconds - static_cast<double>( seconds ) ) * 1e6 );
  client.set_connection_timeout( seconds, micros );
  client.set_read_timeout( seconds, micros );
  client.set_write_timeout( seconds, micros );
  httplib::Headers headers;
  if ( char const* key = std::getenv( config_.api_key_env.c_str() ); key && *key )
    headers.emplace( "Authorization", std::string( "Bearer " ) + key );
  auto const res = client.Post( path_, headers, body.dump(), "application/json" );
  if ( !res )
    throw PolicyError( fmt::format( "request to {}{} failed: {}", host_, path_, httplib::to_string( res.error() ) ) );
  if ( res->status != 200 )
    throw PolicyError( fmt::format( "request to {}{} returned HTTP {}", host_, path_, res->status ) );
  try
  {
    return nlohmann::json::parse( res->body );
  }
  catch ( nlohmann::json::exception const& )
  {
    return nlohmann::json::object();  // handled as a malformed reply
  }
}

ToolCall RemoteLlmPolicy::decide( DecisionContext const& ctx )
{
  auto user = ctx.prompt;
  if ( !rejection_.empty() )
    user += "\nYour previous call was rejected: " + rejection_ + "\n";
  rejection_.clear();
  nlohmann::json messages = nlohmann::json::array( { { { "role", "system" }, { "content", std::string( system_prompt() ) } },
                                                     { { "role", "user" }, { "content", user } } } );
  std::string last;
  for ( int attempt = 1; attempt <= config_.max_attempts; ++attempt )
  {
    nlohmann::json const body{ { "model", config_.model }, { "messages", messages }, { "tools", tool_schemas( ctx.phase ) }, { "tool_choice", "required" } };
    auto const response = post( body );
    auto call = read_call( response, ctx.phase );
    if ( call )
      return *call;
    last = call.reason();
    nlohmann::json reply{ { "role", "assistant" }, { "content", "" } };
    if ( response.contains( "choices" ) && response["choices"].is_array() && !response["choices"].empty() &&
         response["choices"][0].contains( "message" ) )
      reply = response["choices"][0]["message"];
    messages.push_back( reply );
    messages.push_back( { { "role", "user" }, { "content", fmt::format( "Error: {}. Reply with exactly one call to one of: {}.", last, tool_names( ctx.phase ) ) } } );
  }
  throw PolicyError( fmt::format( "no usable tool call after {} attempts: {}", config_.max_attempts, last ) );
}

void RemoteLlmPolicy::on_result( bool applied, std::string const& feedback )
{
  if ( !applied )
    rejection_ = feedback;
}

} // namespace prefixopt
