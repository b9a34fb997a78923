#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace das {

enum class ErrorCode {
  // ingest
  UnsupportedFormat,
  ConverterFailure,
  EmptyDocument,
  MalformedInput,
  // extraction
  ConfigInvalid,
  NotADoi,
  // service
  StoreUnavailable,
  InvalidFilter,
  InvalidRequest,
  NotFound,
  VersionConflict,
  MissingEditedText,
  // evaluation
  CorpusInvalid,
};

std::string_view to_string(ErrorCode code);

// True for the codes raised while turning an input descriptor into a Document.
bool is_ingest_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace das
