#pragma once

#include <json.hpp>

#include "das/document.hpp"
#include "das/extraction.hpp"
#include "das/links.hpp"

// JSON wire forms. Objects serialize with sorted keys, so dump() of equal
// values is byte-identical.
namespace das {

void to_json(nlohmann::json& j, const Span& span);
void from_json(const nlohmann::json& j, Span& span);

void to_json(nlohmann::json& j, const ResourceLink& link);
void from_json(const nlohmann::json& j, ResourceLink& link);

void to_json(nlohmann::json& j, const PrefilterResult& result);
void from_json(const nlohmann::json& j, PrefilterResult& result);

void to_json(nlohmann::json& j, const DataAccessStatement& statement);
void from_json(const nlohmann::json& j, DataAccessStatement& statement);

void to_json(nlohmann::json& j, const ExtractionResult& result);
void from_json(const nlohmann::json& j, ExtractionResult& result);

void to_json(nlohmann::json& j, const Document& document);

}  // namespace das
