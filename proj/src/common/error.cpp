#include "stereotax/error.hpp"

namespace stereotax {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kTransport: return "transport";
    case ErrorKind::kAuth: return "auth";
    case ErrorKind::kRateLimit: return "rate-limit";
    case ErrorKind::kMalformedReply: return "malformed-reply";
    case ErrorKind::kOfflineCacheMiss: return "offline-cache-miss";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kAnalysis: return "analysis";
    case ErrorKind::kInvalidArgument: return "invalid-argument";
  }
  return "unknown";
}

}  // namespace stereotax
