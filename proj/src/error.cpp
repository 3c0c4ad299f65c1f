#include "error.hpp"

namespace semwire {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return "io";
    case ErrorCode::Format: return "format";
    case ErrorCode::Label: return "label";
    case ErrorCode::Container: return "container";
    case ErrorCode::Codec: return "codec";
    case ErrorCode::Dimension: return "dimension";
    case ErrorCode::Rle: return "rle";
    case ErrorCode::External: return "external";
    case ErrorCode::Csv: return "csv";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace semwire
