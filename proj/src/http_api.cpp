#include "das/http_api.hpp"

#include <httplib.h>

#include <charconv>
#include <cmath>

#include "das/hash.hpp"
#include "das/json.hpp"

namespace das {

using nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::MalformedInput:
    case ErrorCode::InvalidFilter:
    case ErrorCode::InvalidRequest:
    case ErrorCode::ConfigInvalid:
    case ErrorCode::NotADoi:
    case ErrorCode::CorpusInvalid:
      return 400;
    case ErrorCode::EmptyDocument:
    case ErrorCode::ConverterFailure:
    case ErrorCode::MissingEditedText:
      return 422;
    case ErrorCode::NotFound:
      return 404;
    case ErrorCode::VersionConflict:
      return 409;
    case ErrorCode::StoreUnavailable:
      return 503;
  }
  return 500;
}

json error_body(ErrorCode code, const std::string& message) {
  return json{{"error_code", to_string(code)}, {"message", message}};
}

namespace {

std::optional<std::string> param(const QueryParams& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

int parse_int(const std::string& key, const std::string& text) {
  int value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw Error(ErrorCode::InvalidFilter, key + " must be an integer");
  }
  return value;
}

double parse_number(const std::string& key, const std::string& text) {
  double value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidFilter, key + " must be a number");
  }
  return value;
}

std::optional<std::string> optional_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorCode::InvalidRequest, std::string(key) + " must be a string");
  }
  return it->get<std::string>();
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidRequest, std::string("request body is not JSON: ") + e.what());
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const Error& e) {
      send_json(res, http_status(e.code()), error_body(e.code(), e.what()));
    } catch (const json::exception& e) {
      send_json(res, 400, error_body(ErrorCode::InvalidRequest, e.what()));
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(json{{"error_code", "Internal"}, {"message", e.what()}}.dump(),
                      "application/json");
    }
  };
}

}  // namespace

InputDescriptor parse_payload(const json& body) {
  if (!body.is_object()) throw Error(ErrorCode::InvalidRequest, "payload must be an object");
  auto format_name = optional_string(body, "format");
  if (!format_name) throw Error(ErrorCode::InvalidRequest, "payload needs 'format'");
  InputDescriptor input;
  input.format = parse_source_format(*format_name);

  auto content = body.find("content");
  if (content == body.end() || content->is_null()) {
    throw Error(ErrorCode::InvalidRequest, "payload needs 'content'");
  }
  switch (input.format) {
    case SourceFormat::plain_text:
      if (!content->is_string()) throw Error(ErrorCode::InvalidRequest, "content must be a string");
      input.content = content->get<std::string>();
      break;
    case SourceFormat::sectioned:
      input.content = content->is_string() ? content->get<std::string>() : content->dump();
      break;
    case SourceFormat::pdf:
      if (!content->is_string()) {
        throw Error(ErrorCode::InvalidRequest, "pdf content must be a base64 string");
      }
      input.content = base64_decode(content->get<std::string>());
      break;
  }

  if (auto meta = body.find("metadata"); meta != body.end() && !meta->is_null()) {
    if (!meta->is_object()) throw Error(ErrorCode::InvalidRequest, "metadata must be an object");
    input.metadata.title = optional_string(*meta, "title");
    input.metadata.origin = optional_string(*meta, "origin");
  }
  return input;
}

StatementFilter parse_filter(const QueryParams& params) {
  StatementFilter filter;
  if (auto v = param(params, "category")) {
    filter.category = parse_category(*v);
    if (!filter.category) throw Error(ErrorCode::InvalidFilter, "unknown category '" + *v + "'");
  }
  if (auto v = param(params, "decision")) {
    filter.decision = parse_decision(*v);
    if (!filter.decision) throw Error(ErrorCode::InvalidFilter, "unknown decision '" + *v + "'");
  }
  if (auto v = param(params, "min_confidence")) {
    filter.min_confidence = parse_number("min_confidence", *v);
  }
  filter.document_id = param(params, "document_id");
  return filter;
}

PageRequest parse_page(const QueryParams& params) {
  PageRequest page;
  if (auto v = param(params, "page")) page.number = parse_int("page", *v);
  if (auto v = param(params, "page_size")) page.size = parse_int("page_size", *v);
  if (page.number < 1) throw Error(ErrorCode::InvalidFilter, "page must be >= 1");
  if (page.size < 1 || page.size > kMaxPageSize) {
    throw Error(ErrorCode::InvalidFilter,
                "page_size must be between 1 and " + std::to_string(kMaxPageSize));
  }
  return page;
}

DecisionRequest parse_decision_request(const json& body) {
  if (!body.is_object()) throw Error(ErrorCode::InvalidRequest, "decision body must be an object");
  DecisionRequest request;
  auto decision = optional_string(body, "decision");
  if (!decision) throw Error(ErrorCode::InvalidRequest, "body needs 'decision'");
  auto parsed = parse_decision(*decision);
  if (!parsed) throw Error(ErrorCode::InvalidRequest, "unknown decision '" + *decision + "'");
  request.decision = *parsed;
  request.edited_text = optional_string(body, "edited_text");
  request.actor = optional_string(body, "actor").value_or("");
  auto version = body.find("expected_version");
  if (version == body.end() || !version->is_number_integer()) {
    throw Error(ErrorCode::InvalidRequest, "body needs integer 'expected_version'");
  }
  request.expected_version = version->get<int>();
  return request;
}

void register_routes(httplib::Server& server, CurationService& service) {
  server.Get("/v1/health", guarded([](const httplib::Request&, httplib::Response& res) {
               send_json(res, 200, json{{"status", "ok"}});
             }));

  server.Post("/v1/documents",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                auto result = service.submit_document(parse_payload(parse_body(req)));
                send_json(res, result.created ? 201 : 200, json(result));
              }));

  server.Post("/v1/check", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                auto result = service.check_document(parse_payload(parse_body(req)));
                json body = result.extraction;
                json contexts = json::object();
                for (std::size_t i = 0; i < result.contexts.size(); ++i) {
                  contexts[result.extraction.statements[i].id] = result.contexts[i];
                }
                body["contexts"] = contexts;
                send_json(res, 200, body);
              }));

  server.Get("/v1/statements",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               auto filter = parse_filter(req.params);
               auto page = parse_page(req.params);
               auto result = service.list_statements(filter, page);
               json body = result;
               body["page"] = page.number;
               body["page_size"] = page.size;
               send_json(res, 200, body);
             }));

  server.Get(R"(/v1/statements/([^/]+))",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, json(service.get_statement(req.matches[1])));
             }));

  server.Post(R"(/v1/statements/([^/]+)/decision)",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                auto request = parse_decision_request(parse_body(req));
                send_json(res, 200, json(service.decide(req.matches[1], request)));
              }));

  server.Get(R"(/v1/statements/([^/]+)/audit)",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, json{{"items", service.audit(req.matches[1])}});
             }));

  server.Get("/v1/export.csv",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               res.status = 200;
               res.set_content(service.export_csv(parse_filter(req.params)),
                               "text/csv; charset=utf-8");
             }));

  // Browsers on another origin may call the API directly.
  server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Max-Age", "600");
  });
  server.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
  });

  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    ErrorCode code = res.status == 404 ? ErrorCode::NotFound : ErrorCode::InvalidRequest;
    res.set_content(error_body(code, "no route for " + req.method + " " + req.path).dump(),
                    "application/json");
    return httplib::Server::HandlerResponse::Handled;
  });
}

ApiServer::ApiServer(CurationService& service) : server_(std::make_unique<httplib::Server>()) {
  register_routes(*server_, service);
}

ApiServer::~ApiServer() = default;

int ApiServer::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void ApiServer::mount_static(const std::string& directory) {
  if (!server_->set_mount_point("/", directory)) {
    throw std::runtime_error("cannot serve static files from " + directory);
  }
}

void ApiServer::run() {
  if (!server_->listen_after_bind()) throw std::runtime_error("server stopped with an error");
}

void ApiServer::stop() { server_->stop(); }

void ApiServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace das
