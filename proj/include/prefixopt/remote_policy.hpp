#pragma once

#include <string>

#include <json.hpp>

#include "policy.hpp"

namespace prefixopt
{

struct RemoteConfig
{
  /// Base URL; requests go to {endpoint}/chat/completions.
  std::string endpoint;
  std::string model = "prefix-agent";
  /// Environment variable holding the bearer token (optional).
  std::string api_key_env = "PREFIXOPT_API_KEY";
  double timeout_seconds = 60.0;
  /// Attempts per decision before a malformed answer becomes a PolicyError.
  int max_attempts = 3;
};

/// Reads {"endpoint", "model", "api_key_env", "timeout_seconds",
/// "max_attempts"}; throws std::invalid_argument on missing endpoint or bad
/// types.
RemoteConfig remote_config_from_json( nlohmann::json const& j );

/// Chat-completions client with function calling. Every decision sends the
/// system prompt, the built prompt and the phase's tool schemas, and takes
/// the first tool call of the first choice. Unparseable, unknown or
/// phase-illegal calls are answered with a corrective message and asked
/// again; network errors and exhausted attempts raise PolicyError.
class RemoteLlmPolicy : public Policy
{
public:
  explicit RemoteLlmPolicy( RemoteConfig config );

  ToolCall decide( DecisionContext const& ctx ) override;
  void on_result( bool applied, std::string const& feedback ) override;

  /// Request bodies sent so far (for logs and tests).
  std::vector<nlohmann::json> const& requests() const { return requests_; }

private:
  nlohmann::json post( nlohmann::json const& body );

  RemoteConfig config_;
  std::string host_;
  std::string path_;
  std::string rejection_;
  std::vector<nlohmann::json> requests_;
};

} // namespace prefixopt
