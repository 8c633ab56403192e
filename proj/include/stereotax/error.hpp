#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stereotax {

/// Failure families. Each maps onto one documented CLI exit code.
enum class ErrorKind {
  kConfig,
  kSchema,
  kIo,
  kTransport,
  kAuth,
  kRateLimit,
  kMalformedReply,
  kOfflineCacheMiss,
  kParse,
  kAnalysis,
  kInvalidArgument,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace stereotax
