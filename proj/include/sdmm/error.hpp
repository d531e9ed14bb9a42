#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdmm {

enum class Errc {
  invalid_parameter,
  dimension_mismatch,
  domain_error,
  insufficient_data,
  insufficient_responses,
  numerical_failure,
  protocol_error,
  io_error,
};

const char* to_string(Errc code) noexcept;

/// Base exception for every failure raised by the library. The code lets
/// callers (CLI, wire protocol) map failures without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

class InsufficientResponses : public Error {
 public:
  InsufficientResponses(std::size_t received, std::size_t required);

  std::size_t received() const noexcept { return received_; }
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t received_;
  std::size_t required_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

inline void require(bool condition, Errc code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace sdmm
