#include "sdmm/error.hpp"

#include <string>

namespace sdmm {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_parameter: return "invalid-parameter";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::domain_error: return "domain-error";
    case Errc::insufficient_data: return "insufficient-data";
    case Errc::insufficient_responses: return "insufficient-responses";
    case Errc::numerical_failure: return "numerical-failure";
    case Errc::protocol_error: return "protocol-error";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

InsufficientResponses::InsufficientResponses(std::size_t received, std::size_t required)
    : Error(Errc::insufficient_responses, "received " + std::to_string(received) +
                                              " responses but decoding needs " +
                                              std::to_string(required)),
      received_(received),
      required_(required) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace sdmm
