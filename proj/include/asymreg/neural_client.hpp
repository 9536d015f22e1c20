#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "asymreg/policy.hpp"

namespace asymreg {

/// Environment variable that overrides the policy service address.
inline constexpr const char* kPolicyEndpointEnv = "ASYMREG_POLICY_ENDPOINT";

class ServiceUnavailable : public PolicyError {
 public:
  using PolicyError::PolicyError;
};

class ProtocolError : public PolicyError {
 public:
  using PolicyError::PolicyError;
};

/// Newline-delimited JSON channel to the policy service, either a TCP stream
/// ("tcp://host:port" or "host:port") or a child process spoken to over its
/// stdin/stdout ("stdio:<shell command>"). One request in flight at a time.
class LineChannel {
 public:
  static std::unique_ptr<LineChannel> open(std::string_view endpoint, std::chrono::milliseconds timeout);

  ~LineChannel();
  LineChannel(const LineChannel&) = delete;
  LineChannel& operator=(const LineChannel&) = delete;

  void write_line(const std::string& line);
  std::string read_line();

 private:
  LineChannel(int read_fd, int write_fd, int child_pid, std::chrono::milliseconds timeout);

  int read_fd_;
  int write_fd_;
  int child_pid_;
  std::chrono::milliseconds timeout_;
  std::string buffer_;
};

/// Client side of the neural policy protocol:
///   request  {"id": int, "rules": [int...], "c0": int, "cinf": int}
///   reply    {"id": int, "probs": [9 floats]}
///   health   {"op": "ping"} -> {"op": "pong"}
/// Replies are re-masked locally before use.
class NeuralPolicyClient final : public Policy {
 public:
  explicit NeuralPolicyClient(std::string_view endpoint,
                              std::chrono::milliseconds timeout = std::chrono::seconds(30));

  PolicyDistribution next_distribution(const DerivationState& state, const Condition& condition) override;
  std::string name() const override { return "nn"; }

  bool ping();
  std::int64_t requests_sent() const { return next_id_; }

 private:
  std::unique_ptr<LineChannel> channel_;
  std::int64_t next_id_ = 0;
};

/// Endpoint from the environment override, falling back to `fallback`.
std::string resolve_policy_endpoint(std::string_view fallback);

std::unique_ptr<Policy> neural_policy_client(std::string_view endpoint);

}  // namespace asymreg
