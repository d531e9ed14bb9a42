#include "sdmm/net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <list>
#include <mutex>
#include <thread>

namespace sdmm::net {

namespace {

constexpr std::uint8_t magic[4] = {'S', 'D', 'M', 'M'};

using Clock = std::chrono::steady_clock;

[[noreturn]] void malformed(const std::string& what) { throw ProtocolError(WireError::malformed, what); }

// ---------------------------------------------------------------------------
// Little-endian packing

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

  void dims(const ComplexMatrix& m) {
    require(m.rows() <= UINT32_MAX && m.cols() <= UINT32_MAX, Errc::invalid_parameter, "matrix too large for the wire");
    u32(static_cast<std::uint32_t>(m.rows()));
    u32(static_cast<std::uint32_t>(m.cols()));
  }
  void data(const ComplexMatrix& m) {
    out_.reserve(out_.size() + 16 * m.size());
    for (const auto v : m.entries()) {
      f64(v.real());
      f64(v.imag());
    }
  }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(take(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(take(4)); }
  double f64() { return std::bit_cast<double>(take(8)); }

  std::pair<std::size_t, std::size_t> dims() {
    const std::size_t r = u32();
    const std::size_t c = u32();
    return {r, c};
  }
  ComplexMatrix data(std::pair<std::size_t, std::size_t> d) {
    const auto [rows, cols] = d;
    const std::uint64_t count = static_cast<std::uint64_t>(rows) * cols;
    if (count > remaining() / 16) malformed("matrix data shorter than its dimensions");
    std::vector<cplx> entries(static_cast<std::size_t>(count));
    for (auto& e : entries) {
      const double re = f64();
      e = cplx(re, f64());
    }
    return ComplexMatrix::from_entries(rows, cols, entries);
  }
  std::string rest() {
    std::string s(in_.begin() + static_cast<std::ptrdiff_t>(pos_), in_.end());
    pos_ = in_.size();
    return s;
  }

  std::size_t remaining() const { return in_.size() - pos_; }
  void finish() const {
    if (remaining() != 0) malformed(std::to_string(remaining()) + " trailing payload bytes");
  }

 private:
  std::uint64_t take(std::size_t n) {
    if (remaining() < n) malformed("truncated payload");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += n;
    return v;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

bool needs_minus(SchemeId id) { return is_real_scheme(id) && !is_inner_scheme(id); }

// ---------------------------------------------------------------------------
// Sockets

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  ~Fd() { reset(); }

  int get() const noexcept { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

[[noreturn]] void sys_fail(const std::string& what) {
  fail(Errc::io_error, what + ": " + std::strerror(errno));
}

sockaddr_in to_sockaddr(const Endpoint& ep) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(ep.port);
  if (ep.host.empty() || ep.host == "localhost") {
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    return addr;
  }
  if (::inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) == 1) return addr;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const int rc = ::getaddrinfo(ep.host.c_str(), nullptr, &hints, &found);
  require(rc == 0 && found, Errc::io_error, "cannot resolve host '" + ep.host + "'");
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(found->ai_addr)->sin_addr;
  ::freeaddrinfo(found);
  return addr;
}

void send_all(int fd, std::span<const std::uint8_t> bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const auto n = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      sys_fail("send");
    }
    sent += static_cast<std::size_t>(n);
  }
}

/// Reads up to n bytes; fewer only at end of stream.
std::size_t recv_exact(int fd, std::uint8_t* buf, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    const auto r = ::recv(fd, buf + got, n - got, 0);
    if (r == 0) break;
    if (r < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) fail(Errc::io_error, "receive timed out");
      sys_fail("recv");
    }
    got += static_cast<std::size_t>(r);
  }
  return got;
}

/// nullopt on a clean close between frames.
std::optional<Frame> read_frame(int fd, std::size_t cap) {
  std::uint8_t head[header_size];
  const auto got = recv_exact(fd, head, header_size);
  if (got == 0) return std::nullopt;
  if (got < header_size) malformed("truncated frame header");
  const auto h = decode_header({head, header_size}, cap);
  Frame f{h.type, std::vector<std::uint8_t>(h.payload_len)};
  if (recv_exact(fd, f.payload.data(), f.payload.size()) < f.payload.size()) malformed("truncated frame payload");
  return f;
}

void write_frame(int fd, const Frame& frame) { send_all(fd, encode_frame(frame)); }

void set_timeout(int fd, std::chrono::milliseconds ms) {
  ms = std::max(ms, std::chrono::milliseconds(1));
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(ms.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((ms.count() % 1000) * 1000);
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
}

std::chrono::milliseconds remaining(Clock::time_point deadline) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
}

Fd connect_by(const Endpoint& ep, Clock::time_point deadline) {
  const auto addr = to_sockaddr(ep);
  Fd fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (fd.get() < 0) sys_fail("socket");
  const int flags = ::fcntl(fd.get(), F_GETFL);
  ::fcntl(fd.get(), F_SETFL, flags | O_NONBLOCK);
  if (::connect(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    if (errno != EINPROGRESS) sys_fail("connect");
    pollfd p{fd.get(), POLLOUT, 0};
    const auto wait = std::max<long long>(0, remaining(deadline).count());
    const int rc = ::poll(&p, 1, static_cast<int>(std::min<long long>(wait, INT32_MAX)));
    if (rc == 0) fail(Errc::io_error, "connect timed out");
    if (rc < 0) sys_fail("poll");
    int err = 0;
    socklen_t len = sizeof(err);
    ::getsockopt(fd.get(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) {
      errno = err;
      sys_fail("connect");
    }
  }
  ::fcntl(fd.get(), F_SETFL, flags);
  const int one = 1;
  ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return fd;
}

Frame error_frame(WireError code, const std::string& message) {
  return {MsgType::error, encode_error({code, message})};
}

}  // namespace

ProtocolError::ProtocolError(WireError wire, const std::string& what)
    : Error(Errc::protocol_error, what), wire_(wire) {}

// ---------------------------------------------------------------------------
// Frames

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
  require(frame.payload.size() <= UINT32_MAX, Errc::invalid_parameter, "payload exceeds 4 GiB");
  Writer w;
  w.bytes(magic);
  w.u8(protocol_version);
  w.u8(static_cast<std::uint8_t>(frame.type));
  w.u32(static_cast<std::uint32_t>(frame.payload.size()));
  w.bytes(frame.payload);
  return w.take();
}

Header decode_header(std::span<const std::uint8_t> bytes, std::size_t cap) {
  if (bytes.size() < header_size) malformed("truncated frame header");
  if (!std::equal(magic, magic + 4, bytes.begin())) malformed("bad magic");
  if (bytes[4] != protocol_version) {
    throw ProtocolError(WireError::bad_version, "unsupported protocol version " + std::to_string(bytes[4]));
  }
  const auto type = bytes[5];
  if (type < 0x01 || type > 0x05) {
    throw ProtocolError(WireError::unknown_type, "unknown message type " + std::to_string(type));
  }
  Reader r(bytes.subspan(6, 4));
  const auto len = r.u32();
  if (len > cap) {
    throw ProtocolError(WireError::oversized,
                        "payload of " + std::to_string(len) + " bytes exceeds the cap of " + std::to_string(cap));
  }
  return {static_cast<MsgType>(type), len};
}

Frame decode_frame(std::span<const std::uint8_t> bytes, std::size_t cap) {
  const auto h = decode_header(bytes, cap);
  const auto body = bytes.subspan(header_size);
  if (body.size() < h.payload_len) malformed("truncated frame payload");
  if (body.size() > h.payload_len) malformed("bytes after the frame payload");
  return {h.type, std::vector<std::uint8_t>(body.begin(), body.end())};
}

// ---------------------------------------------------------------------------
// Payloads

std::vector<std::uint8_t> encode_task(const TaskPayload& task) {
  Writer w;
  w.u8(static_cast<std::uint8_t>(task.scheme));
  w.u16(task.worker);
  w.u8(task.flags);
  w.dims(task.a);
  w.dims(task.b);
  w.data(task.a);
  w.data(task.b);
  return w.take();
}

TaskPayload decode_task(std::span<const std::uint8_t> payload) {
  Reader r(payload);
  TaskPayload t;
  const auto id = r.u8();
  if (id < 1 || id > 8) malformed("unknown scheme id " + std::to_string(id));
  t.scheme = static_cast<SchemeId>(id);
  t.worker = r.u16();
  t.flags = r.u8();
  if (t.flags & ~(flag_minus | flag_single)) malformed("unknown task flags");
  if (static_cast<bool>(t.flags & flag_minus) != needs_minus(t.scheme)) {
    malformed(std::string("minus flag does not match scheme ") + to_string(t.scheme));
  }
  const auto ad = r.dims();
  const auto bd = r.dims();
  t.a = r.data(ad);
  t.b = r.data(bd);
  r.finish();
  if (t.flags & flag_single) {
    t.a = t.a.with_precision(Precision::f32);
    t.b = t.b.with_precision(Precision::f32);
  }
  return t;
}

std::vector<std::uint8_t> encode_result(const ResultPayload& result) {
  Writer w;
  w.u16(result.worker);
  w.u8(result.minus ? 0x01 : 0x00);
  w.dims(result.plus);
  if (result.minus) w.dims(*result.minus);
  w.data(result.plus);
  if (result.minus) w.data(*result.minus);
  return w.take();
}

ResultPayload decode_result(std::span<const std::uint8_t> payload) {
  Reader r(payload);
  ResultPayload out;
  out.worker = r.u16();
  const auto flags = r.u8();
  if (flags & ~0x01) malformed("unknown result flags");
  const auto pd = r.dims();
  std::optional<std::pair<std::size_t, std::size_t>> md;
  if (flags & 0x01) md = r.dims();
  out.plus = r.data(pd);
  if (md) out.minus = r.data(*md);
  r.finish();
  return out;
}

std::vector<std::uint8_t> encode_error(const ErrorPayload& error) {
  Writer w;
  w.u8(static_cast<std::uint8_t>(error.code));
  w.bytes({reinterpret_cast<const std::uint8_t*>(error.message.data()), error.message.size()});
  return w.take();
}

ErrorPayload decode_error(std::span<const std::uint8_t> payload) {
  Reader r(payload);
  const auto code = r.u8();
  if (code < 0x01 || code > 0x05) malformed("unknown error code " + std::to_string(code));
  return {static_cast<WireError>(code), r.rest()};
}

TaskPayload make_task(SchemeId scheme, const WorkerShare& share, Precision precision) {
  require(share.worker <= UINT16_MAX, Errc::invalid_parameter, "worker index exceeds 65535");
  TaskPayload t;
  t.scheme = scheme;
  t.worker = static_cast<std::uint16_t>(share.worker);
  t.flags = static_cast<std::uint8_t>((needs_minus(scheme) ? flag_minus : 0) |
                                      (precision == Precision::f32 ? flag_single : 0));
  t.a = share.a;
  t.b = share.b;
  return t;
}

WorkerResponse to_response(const ResultPayload& result) {
  return {result.worker, result.plus, result.minus};
}

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  const std::string host = colon == std::string::npos ? "127.0.0.1" : text.substr(0, colon);
  const std::string port = colon == std::string::npos ? text : text.substr(colon + 1);
  require(!port.empty() && port.size() <= 5 && std::all_of(port.begin(), port.end(), ::isdigit),
          Errc::invalid_parameter, "bad port in '" + text + "'");
  const auto value = std::stoul(port);
  require(value <= 65535, Errc::invalid_parameter, "port out of range in '" + text + "'");
  return {host.empty() ? "127.0.0.1" : host, static_cast<std::uint16_t>(value)};
}

std::vector<Endpoint> parse_endpoints(const std::string& comma_separated) {
  std::vector<Endpoint> out;
  std::size_t start = 0;
  while (start <= comma_separated.size()) {
    const auto end = std::min(comma_separated.find(',', start), comma_separated.size());
    const auto item = comma_separated.substr(start, end - start);
    if (!item.empty()) out.push_back(parse_endpoint(item));
    start = end + 1;
  }
  require(!out.empty(), Errc::invalid_parameter, "empty worker address list");
  return out;
}

// ---------------------------------------------------------------------------
// Worker server

struct WorkerServer::State {
  struct Connection {
    int fd;
    std::thread thread;
    std::atomic<bool> done{false};
  };

  Fd listener;
  std::uint16_t port = 0;
  ServerOptions options;
  std::atomic<bool> stopping{false};
  std::mutex mutex;
  std::list<Connection> connections;

  void reap(bool all) {
    std::list<Connection> finished;
    {
      std::lock_guard lock(mutex);
      for (auto it = connections.begin(); it != connections.end();) {
        auto next = std::next(it);
        if (all || it->done) finished.splice(finished.end(), connections, it);
        it = next;
      }
    }
    for (auto& c : finished) c.thread.join();
  }

  void serve(int fd) {
    for (;;) {
      std::optional<Frame> frame;
      try {
        frame = read_frame(fd, options.payload_cap);
      } catch (const ProtocolError& e) {
        try {
          write_frame(fd, error_frame(e.wire(), e.what()));
        } catch (const Error&) {
        }
        return;
      } catch (const Error&) {
        return;
      }
      if (!frame) return;
      try {
        switch (frame->type) {
          case MsgType::ping:
            write_frame(fd, {MsgType::pong, frame->payload});
            break;
          case MsgType::task: {
            TaskPayload task;
            try {
              task = decode_task(frame->payload);
            } catch (const ProtocolError& e) {
              write_frame(fd, error_frame(e.wire(), e.what()));
              return;
            }
            ResultPayload result;
            try {
              const auto r = worker_compute(task.scheme, task.worker, task.a, task.b, options.compute);
              result = {task.worker, r.plus, r.minus};
            } catch (const std::exception& e) {
              write_frame(fd, error_frame(WireError::compute_failed, e.what()));
              return;
            }
            write_frame(fd, {MsgType::result, encode_result(result)});
            break;
          }
          default:
            write_frame(fd, error_frame(WireError::malformed, "workers accept only TASK and PING"));
            return;
        }
      } catch (const Error&) {
        return;
      }
    }
  }
};

WorkerServer::WorkerServer(const Endpoint& bind, ServerOptions options) : state_(std::make_unique<State>()) {
  state_->options = options;
  const auto addr = to_sockaddr(bind);
  state_->listener = Fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  const int fd = state_->listener.get();
  if (fd < 0) sys_fail("socket");
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    sys_fail("bind " + bind.host + ":" + std::to_string(bind.port));
  }
  if (::listen(fd, 64) != 0) sys_fail("listen");
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
  state_->port = ntohs(bound.sin_port);
}

WorkerServer::~WorkerServer() {
  stop();
  state_->reap(true);
}

std::uint16_t WorkerServer::port() const noexcept { return state_->port; }

void WorkerServer::run() {
  auto& s = *state_;
  while (!s.stopping) {
    pollfd p{s.listener.get(), POLLIN, 0};
    const int rc = ::poll(&p, 1, 100);
    s.reap(false);
    if (rc <= 0) continue;
    const int client = ::accept4(s.listener.get(), nullptr, nullptr, SOCK_CLOEXEC);
    if (client < 0) continue;
    const int one = 1;
    ::setsockopt(client, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    std::lock_guard lock(s.mutex);
    if (s.stopping) {
      ::close(client);
      break;
    }
    auto& c = s.connections.emplace_back();
    c.fd = client;
    c.thread = std::thread([&s, &c] {
      s.serve(c.fd);
      {
        std::lock_guard inner(s.mutex);
        ::close(c.fd);
        c.fd = -1;
      }
      c.done = true;
    });
  }
  s.reap(true);
}

void WorkerServer::stop() {
  auto& s = *state_;
  s.stopping = true;
  std::lock_guard lock(s.mutex);
  for (auto& c : s.connections) {
    if (c.fd >= 0) ::shutdown(c.fd, SHUT_RDWR);
  }
}

// ---------------------------------------------------------------------------
// Client side

Frame request(const Endpoint& to, const Frame& frame, std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  auto fd = connect_by(to, deadline);
  set_timeout(fd.get(), remaining(deadline));
  write_frame(fd.get(), frame);
  auto reply = read_frame(fd.get(), default_payload_cap);
  require(reply.has_value(), Errc::io_error, "connection closed without a reply");
  return *reply;
}

CoordinateResult coordinate(const std::vector<Endpoint>& workers, const SchemeParams& params, const ComplexMatrix& a,
                            const ComplexMatrix& b, std::chrono::milliseconds timeout) {
  const auto p = resolve(params);
  require(workers.size() == p.n_workers, Errc::invalid_parameter,
          "expected " + std::to_string(p.n_workers) + " worker addresses, got " + std::to_string(workers.size()));
  require(timeout.count() > 0, Errc::invalid_parameter, "timeout must be positive");
  const auto shares = encode(p, a, b);
  const std::size_t needed = is_dft_scheme(p.scheme) ? p.n_workers : recovery_threshold(p);
  const auto deadline = Clock::now() + timeout;

  std::mutex mutex;
  std::condition_variable cv;
  std::vector<WorkerResponse> arrivals;
  std::vector<int> fds(workers.size(), -1);
  std::size_t finished = 0;
  bool done = false;

  std::vector<std::thread> threads;
  threads.reserve(workers.size());
  for (std::size_t i = 0; i < workers.size(); ++i) {
    threads.emplace_back([&, i] {
      std::optional<WorkerResponse> response;
      Fd fd;
      try {
        fd = connect_by(workers[i], deadline);
        {
          std::lock_guard lock(mutex);
          if (done) return;
          fds[i] = fd.get();
        }
        set_timeout(fd.get(), remaining(deadline));
        const auto& share = shares.shares[i];
        write_frame(fd.get(), {MsgType::task, encode_task(make_task(p.scheme, share, p.precision))});
        const auto reply = read_frame(fd.get(), default_payload_cap);
        if (reply && reply->type == MsgType::result) {
          auto r = to_response(decode_result(reply->payload));
          if (r.worker == share.worker) {
            r.plus = r.plus.with_precision(p.precision);
            if (r.minus) r.minus = r.minus->with_precision(p.precision);
            response = std::move(r);
          }
        }
        std::lock_guard lock(mutex);
        fds[i] = -1;
      } catch (const std::exception&) {
        std::lock_guard lock(mutex);
        fds[i] = -1;
      }
      std::lock_guard lock(mutex);
      ++finished;
      if (response && !done) arrivals.push_back(std::move(*response));
      cv.notify_all();
    });
  }

  {
    std::unique_lock lock(mutex);
    cv.wait_until(lock, deadline, [&] { return arrivals.size() >= needed || finished == workers.size(); });
    done = true;
    for (const int fd : fds) {
      if (fd >= 0) ::shutdown(fd, SHUT_RDWR);
    }
  }
  for (auto& t : threads) t.join();

  if (arrivals.size() < needed) throw InsufficientResponses(arrivals.size(), needed);
  CoordinateResult out;
  for (const auto& r : arrivals) out.arrivals.push_back(r.worker);
  arrivals.resize(needed);
  std::sort(arrivals.begin(), arrivals.end(), [](const auto& x, const auto& y) { return x.worker < y.worker; });
  DecodeOptions opts;
  opts.residue = ResiduePolicy::report;
  auto decoded = decode(p, arrivals, opts);
  out.product = std::move(decoded.product);
  out.used_workers = std::move(decoded.used_workers);
  out.imag_residue = decoded.imag_residue;
  return out;
}

}  // namespace sdmm::net
