#pragma once

#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "das/error.hpp"
#include "das/ingest.hpp"
#include "das/records.hpp"
#include "das/service.hpp"

namespace httplib {
class Server;
}

namespace das {

using QueryParams = std::multimap<std::string, std::string>;

int http_status(ErrorCode code);

nlohmann::json error_body(ErrorCode code, const std::string& message);

// {format, content, metadata?}. PDF content is base64. Sectioned content
// may be an object or its serialized string.
InputDescriptor parse_payload(const nlohmann::json& body);

// category, decision, min_confidence, document_id. Throws InvalidFilter.
StatementFilter parse_filter(const QueryParams& params);

// page, page_size. Throws InvalidFilter.
PageRequest parse_page(const QueryParams& params);

DecisionRequest parse_decision_request(const nlohmann::json& body);

// Installs the /v1 routes on `server`.
void register_routes(httplib::Server& server, CurationService& service);

class ApiServer {
 public:
  explicit ApiServer(CurationService& service);
  ~ApiServer();

  // Port 0 picks a free port. Returns the bound port; throws on failure.
  int bind(const std::string& host, int port);

  // Serves files under `directory` at "/", e.g. the dashboard build.
  void mount_static(const std::string& directory);

  // Serves until stop(). Requires a prior bind().
  void run();

  void stop();
  void wait_until_ready() const;

 private:
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace das
