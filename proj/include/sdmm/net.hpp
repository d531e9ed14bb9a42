#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdmm/error.hpp"
#include "sdmm/schemes.hpp"

namespace sdmm::net {

inline constexpr std::uint8_t protocol_version = 0x01;
inline constexpr std::size_t header_size = 10;
inline constexpr std::size_t default_payload_cap = std::size_t{256} << 20;

enum class MsgType : std::uint8_t {
  task = 0x01,
  result = 0x02,
  error = 0x03,
  ping = 0x04,
  pong = 0x05,
};

enum class WireError : std::uint8_t {
  malformed = 0x01,
  bad_version = 0x02,
  unknown_type = 0x03,
  oversized = 0x04,
  compute_failed = 0x05,
};

/// Protocol violation; carries the code sent back in an ERROR frame.
class ProtocolError : public Error {
 public:
  ProtocolError(WireError wire, const std::string& what);
  WireError wire() const noexcept { return wire_; }

 private:
  WireError wire_;
};

struct Frame {
  MsgType type = MsgType::ping;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

std::vector<std::uint8_t> encode_frame(const Frame& frame);

struct Header {
  MsgType type;
  std::uint32_t payload_len;
};
/// Validates magic, version, type and the payload cap.
Header decode_header(std::span<const std::uint8_t> bytes, std::size_t cap = default_payload_cap);
/// One complete frame; trailing bytes are rejected.
Frame decode_frame(std::span<const std::uint8_t> bytes, std::size_t cap = default_payload_cap);

/// TASK flag bits.
inline constexpr std::uint8_t flag_minus = 0x01;
/// Worker computes in single precision.
inline constexpr std::uint8_t flag_single = 0x02;

struct TaskPayload {
  SchemeId scheme = SchemeId::cmatdot;
  std::uint16_t worker = 0;
  std::uint8_t flags = 0;
  ComplexMatrix a;
  ComplexMatrix b;

  friend bool operator==(const TaskPayload&, const TaskPayload&) = default;
};

struct ResultPayload {
  std::uint16_t worker = 0;
  ComplexMatrix plus;
  std::optional<ComplexMatrix> minus;

  friend bool operator==(const ResultPayload&, const ResultPayload&) = default;
};

struct ErrorPayload {
  WireError code = WireError::malformed;
  std::string message;

  friend bool operator==(const ErrorPayload&, const ErrorPayload&) = default;
};

std::vector<std::uint8_t> encode_task(const TaskPayload& task);
TaskPayload decode_task(std::span<const std::uint8_t> payload);
std::vector<std::uint8_t> encode_result(const ResultPayload& result);
ResultPayload decode_result(std::span<const std::uint8_t> payload);
std::vector<std::uint8_t> encode_error(const ErrorPayload& error);
ErrorPayload decode_error(std::span<const std::uint8_t> payload);

TaskPayload make_task(SchemeId scheme, const WorkerShare& share, Precision precision);
WorkerResponse to_response(const ResultPayload& result);

/// "host:port"; a bare port binds or connects on 127.0.0.1.
struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};
Endpoint parse_endpoint(const std::string& text);
std::vector<Endpoint> parse_endpoints(const std::string& comma_separated);

struct ServerOptions {
  std::size_t payload_cap = default_payload_cap;
  ComputeOptions compute;
};

/// Worker daemon. Binds in the constructor (port 0 picks a free port).
class WorkerServer {
 public:
  explicit WorkerServer(const Endpoint& bind, ServerOptions options = {});
  ~WorkerServer();
  WorkerServer(const WorkerServer&) = delete;
  WorkerServer& operator=(const WorkerServer&) = delete;

  std::uint16_t port() const noexcept;
  /// Accepts until stop(); each connection is served on its own thread.
  void run();
  /// Safe from any thread; closes open connections.
  void stop();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

/// Blocking round trip over a fresh connection.
Frame request(const Endpoint& to, const Frame& frame, std::chrono::milliseconds timeout);

struct CoordinateResult {
  ComplexMatrix product;
  /// Workers whose responses were decoded, ascending.
  std::vector<std::size_t> used_workers;
  /// Every worker that answered before the deadline, in arrival order.
  std::vector<std::size_t> arrivals;
  double imag_residue = 0.0;
};

/// Encodes locally, sends one TASK per worker concurrently and decodes from
/// the first R responses. Workers missing the deadline count as stragglers.
CoordinateResult coordinate(const std::vector<Endpoint>& workers, const SchemeParams& params, const ComplexMatrix& a,
                            const ComplexMatrix& b, std::chrono::milliseconds timeout);

}  // namespace sdmm::net
