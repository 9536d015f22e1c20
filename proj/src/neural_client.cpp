#include "asymreg/neural_client.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "json.hpp"

namespace asymreg {

namespace {

int connect_tcp(const std::string& host, const std::string& port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  if (int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &result); rc != 0) {
    throw ServiceUnavailable("cannot resolve " + host + ":" + port + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(result);
  if (fd < 0) throw ServiceUnavailable("cannot connect to " + host + ":" + port + ": " + std::strerror(errno));
  return fd;
}

}  // namespace

std::unique_ptr<LineChannel> LineChannel::open(std::string_view endpoint, std::chrono::milliseconds timeout) {
  std::string ep(endpoint);
  if (ep.rfind("stdio:", 0) == 0) {
    std::string command = ep.substr(6);
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0) throw ServiceUnavailable("pipe failed");
    if (::pipe(from_child) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw ServiceUnavailable("pipe failed");
    }
    pid_t pid = ::fork();
    if (pid < 0) throw ServiceUnavailable("fork failed");
    if (pid == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    return std::unique_ptr<LineChannel>(new LineChannel(from_child[0], to_child[1], pid, timeout));
  }

  if (ep.rfind("tcp://", 0) == 0) ep = ep.substr(6);
  auto colon = ep.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == ep.size()) {
    throw ServiceUnavailable("malformed policy endpoint: " + std::string(endpoint));
  }
  int fd = connect_tcp(ep.substr(0, colon), ep.substr(colon + 1));
  return std::unique_ptr<LineChannel>(new LineChannel(fd, fd, -1, timeout));
}

LineChannel::LineChannel(int read_fd, int write_fd, int child_pid, std::chrono::milliseconds timeout)
    : read_fd_(read_fd), write_fd_(write_fd), child_pid_(child_pid), timeout_(timeout) {
  // A service that disappears must surface as an error, not kill the process.
  ::signal(SIGPIPE, SIG_IGN);
}

LineChannel::~LineChannel() {
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  if (read_fd_ >= 0) ::close(read_fd_);
  if (child_pid_ > 0) {
    int status = 0;
    if (::waitpid(child_pid_, &status, WNOHANG) == 0) {
      ::kill(child_pid_, SIGTERM);
      ::waitpid(child_pid_, &status, 0);
    }
  }
}

void LineChannel::write_line(const std::string& line) {
  std::string data = line + "\n";
  std::size_t sent = 0;
  while (sent < data.size()) {
    ssize_t n = ::write(write_fd_, data.data() + sent, data.size() - sent);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ServiceUnavailable(std::string("write to policy service failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::string LineChannel::read_line() {
  while (true) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    pollfd pfd{read_fd_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(timeout_.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw ServiceUnavailable(std::string("poll failed: ") + std::strerror(errno));
    }
    if (rc == 0) throw ServiceUnavailable("policy service timed out");
    char chunk[4096];
    ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ServiceUnavailable(std::string("read from policy service failed: ") + std::strerror(errno));
    }
    if (n == 0) throw ServiceUnavailable("policy service closed the connection");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

NeuralPolicyClient::NeuralPolicyClient(std::string_view endpoint, std::chrono::milliseconds timeout)
    : channel_(LineChannel::open(endpoint, timeout)) {}

PolicyDistribution NeuralPolicyClient::next_distribution(const DerivationState& state, const Condition& condition) {
  RuleMask mask = valid_next_mask(state);
  const std::int64_t id = next_id_++;
  nlohmann::json request = {{"id", id},
                            {"rules", rules_to_ints(state.rules())},
                            {"c0", condition.c0},
                            {"cinf", condition.cinf}};
  channel_->write_line(request.dump());
  std::string line = channel_->read_line();

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError("malformed reply from policy service: " + std::string(e.what()));
  }
  if (!reply.is_object() || !reply.contains("id") || !reply["id"].is_number_integer()) {
    throw ProtocolError("reply without integer id: " + line);
  }
  if (reply["id"].get<std::int64_t>() != id) {
    throw ProtocolError("reply id " + reply["id"].dump() + " does not match request id " + std::to_string(id));
  }
  if (reply.contains("error")) throw ProtocolError("policy service error: " + reply["error"].dump());
  const auto probs = reply.find("probs");
  if (probs == reply.end() || !probs->is_array() || probs->size() != kNumRules) {
    throw ProtocolError("reply needs 9 probabilities: " + line);
  }
  RuleProbs raw{};
  for (std::size_t i = 0; i < kNumRules; ++i) {
    if (!(*probs)[i].is_number()) throw ProtocolError("non-numeric probability: " + line);
    raw[i] = (*probs)[i].get<double>();
    if (!std::isfinite(raw[i]) || raw[i] < 0) throw ProtocolError("invalid probability: " + line);
  }
  return mask_distribution(raw, mask);
}

bool NeuralPolicyClient::ping() {
  channel_->write_line(R"({"op":"ping"})");
  std::string line = channel_->read_line();
  try {
    auto reply = nlohmann::json::parse(line);
    return reply.is_object() && reply.value("op", "") == "pong";
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError("malformed ping reply: " + line);
  }
}

std::string resolve_policy_endpoint(std::string_view fallback) {
  if (const char* env = std::getenv(kPolicyEndpointEnv); env != nullptr && *env != '\0') return env;
  return std::string(fallback);
}

std::unique_ptr<Policy> neural_policy_client(std::string_view endpoint) {
  return std::make_unique<NeuralPolicyClient>(endpoint);
}

}  // namespace asymreg
