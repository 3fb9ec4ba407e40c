#include "freact/wiki_api.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "freact/errors.hpp"
#include "freact/text.hpp"

namespace freact {

namespace {

using nlohmann::json;

std::string url_encode(const std::string& value) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(value.size() * 3);
  for (unsigned char c : value) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else if (c == ' ') {
      out.push_back('+');
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xf]);
    }
  }
  return out;
}

}  // namespace

MediaWikiSource::MediaWikiSource(MediaWikiConfig config) : config_(std::move(config)) {
  size_t scheme_end = config_.api_url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("MediaWiki api_url must include a scheme: " + config_.api_url);
  }
  size_t path_start = config_.api_url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    origin_ = config_.api_url;
    api_path_ = "/w/api.php";
  } else {
    origin_ = config_.api_url.substr(0, path_start);
    api_path_ = config_.api_url.substr(path_start);
  }
}

std::string MediaWikiSource::get(const std::string& query_params) {
  std::string last_error;
  int last_status = 0;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      double backoff = config_.retry_backoff_seconds * std::pow(2.0, attempt - 1);
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
    }
    httplib::Client client(origin_);
    client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_seconds));
    client.set_read_timeout(std::chrono::duration<double>(config_.timeout_seconds));
    client.set_follow_location(true);

    httplib::Result result = client.Get(api_path_ + "?" + query_params);
    if (!result) {
      last_error = httplib::to_string(result.error());
      continue;
    }
    last_status = result->status;
    if (result->status == 200) return result->body;
    if (result->status < 500 && result->status != 429) break;  // not retryable
  }
  throw ToolError("MediaWiki request failed" +
                  (last_status ? " with status " + std::to_string(last_status)
                               : " (" + last_error + ")"));
}

PageResult MediaWikiSource::find_page(const std::string& entity) {
  std::string extract_body =
      get("action=query&prop=extracts&explaintext=1&exintro=1&redirects=1&format=json&titles=" +
          url_encode(entity));
  try {
    json parsed = json::parse(extract_body);
    const json& pages = parsed.at("query").at("pages");
    for (const auto& [page_id, page] : pages.items()) {
      if (page_id == "-1") break;  // missing page marker
      std::string extract = page.value("extract", "");
      if (extract.empty()) break;
      WikiPage result;
      result.title = page.value("title", entity);
      result.sentences = split_sentences(extract);
      if (!result.sentences.empty()) return PageResult{std::move(result), {}};
      break;
    }
  } catch (const json::exception& ex) {
    throw ToolError(std::string("unparseable MediaWiki extract response: ") + ex.what());
  }

  // No direct page: collect similar titles from the search endpoint.
  std::string search_body =
      get("action=query&list=search&format=json&srlimit=" +
          std::to_string(config_.max_similar) + "&srsearch=" + url_encode(entity));
  PageResult miss;
  try {
    json parsed = json::parse(search_body);
    for (const auto& hit : parsed.at("query").at("search")) {
      miss.similar.push_back(hit.value("title", ""));
    }
  } catch (const json::exception& ex) {
    throw ToolError(std::string("unparseable MediaWiki search response: ") + ex.what());
  }
  return miss;
}

}  // namespace freact
