#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "almostoa/repository.hpp"

namespace almostoa::testing {

inline constexpr const char* kGomannTitle =
    "Palladium-mediated organic synthesis using porous polymer monolith formed in situ as a continuous "
    "catalyst support structure for application in microfluidic devices";
inline constexpr const char* kGomannCitation =
    "Gömann, Anissa et al.(2009). Palladium-mediated organic synthesis using porous polymer monolith formed "
    "in situ as a continuous catalyst support structure for application in microfluidic devices. "
    "Tetrahedron, 65(7): 1450-1454.";
inline constexpr const char* kDepositorAddress = "anissa.gomann@uqam.ca";
inline constexpr const char* kRequester = "requester@someplace.ca";

inline Timestamp at(const char* iso) { return *parse_timestamp(iso); }
inline Date on(const char* iso) { return *parse_date(iso); }

inline EprintMetadata gomann_metadata() {
  EprintMetadata m;
  m.title = kGomannTitle;
  m.creators = {"Gömann, Anissa", "Shepherd, Roderick", "Bradley, Cheryl"};
  m.year = 2009;
  m.venue.kind = VenueKind::JournalArticle;
  m.venue.container_title = "Tetrahedron";
  m.venue.volume = "65";
  m.venue.issue = "7";
  m.venue.pages = "1450-1454";
  return m;
}

inline EprintMetadata article(std::string title, std::string journal, std::string volume, std::string issue) {
  EprintMetadata m;
  m.title = std::move(title);
  m.creators = {"Author, Some"};
  m.year = 2009;
  m.venue.container_title = std::move(journal);
  m.venue.volume = std::move(volume);
  m.venue.issue = std::move(issue);
  return m;
}

inline EprintMetadata chapter(std::string title, std::string book, std::string number) {
  EprintMetadata m;
  m.title = std::move(title);
  m.creators = {"Writer, Chapter"};
  m.year = 2008;
  m.venue.kind = VenueKind::BookChapter;
  m.venue.container_title = std::move(book);
  m.venue.chapter = std::move(number);
  return m;
}

inline Depositor gomann_depositor() { return {"Gömann, Anissa", kDepositorAddress, true, std::nullopt}; }

inline RepositoryConfig archipel_config(std::string jurisdiction = "CA") {
  RepositoryConfig c;
  c.repo_name = "Archipel";
  c.base_url = "http://www.archipel.uqam.ca";
  c.admin_address = "archipel-admin@uqam.ca";
  c.manager_address = "archipel-manager@uqam.ca";
  c.admin_secret = "s3cret";
  c.jurisdiction = std::move(jurisdiction);
  return c;
}

inline std::unique_ptr<Repository> memory_repo(RepositoryConfig config = archipel_config(), std::uint64_t seed = 1) {
  return std::make_unique<Repository>(std::move(config), std::nullopt, std::make_unique<SeededTokenSource>(seed));
}

inline std::vector<Repository::Document> one_pdf(std::string tag = "main") {
  return {{tag + ".pdf", "application/pdf", "%PDF-1.4 " + tag}};
}

inline std::vector<Repository::Document> two_parts() {
  return {{"article.pdf", "application/pdf", "%PDF-1.4 article body"},
          {"supplement.zip", "application/zip", "PK supplementary data"}};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  static std::mt19937_64 rng{std::random_device{}()};
  auto dir = std::filesystem::temp_directory_path() / ("almostoa-" + name + "-" + std::to_string(rng()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string source_path(const std::string& rel) { return std::string{ALMOSTOA_SOURCE_DIR} + "/" + rel; }

}  // namespace almostoa::testing
