#include "das/error.hpp"

namespace das {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::ConverterFailure: return "ConverterFailure";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::NotADoi: return "NotADoi";
    case ErrorCode::StoreUnavailable: return "StoreUnavailable";
    case ErrorCode::InvalidFilter: return "InvalidFilter";
    case ErrorCode::InvalidRequest: return "InvalidRequest";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::VersionConflict: return "VersionConflict";
    case ErrorCode::MissingEditedText: return "MissingEditedText";
    case ErrorCode::CorpusInvalid: return "CorpusInvalid";
  }
  return "Unknown";
}

bool is_ingest_error(ErrorCode code) {
  return code == ErrorCode::UnsupportedFormat || code == ErrorCode::ConverterFailure ||
         code == ErrorCode::EmptyDocument || code == ErrorCode::MalformedInput;
}

}  // namespace das
