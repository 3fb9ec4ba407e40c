#pragma once

#include <string>

#include "freact/tools.hpp"

namespace freact {

struct MediaWikiConfig {
  std::string api_url = "https://en.wikipedia.org/w/api.php";
  double timeout_seconds = 15.0;
  int max_retries = 2;
  double retry_backoff_seconds = 0.5;
  int max_similar = 5;
};

// Live page source over the public MediaWiki API: one extract query per
// entity (redirects followed), falling back to a title search for the
// similar-titles list on a miss.
class MediaWikiSource : public KnowledgeSource {
 public:
  explicit MediaWikiSource(MediaWikiConfig config = {});

  PageResult find_page(const std::string& entity) override;

 private:
  std::string get(const std::string& query_params);

  MediaWikiConfig config_;
  std::string origin_;
  std::string api_path_;
};

}  // namespace freact
