#include "almostoa/ingest.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "almostoa/errors.hpp"

namespace almostoa {
namespace fs = std::filesystem;

namespace {

std::optional<std::string> optional_text(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    return std::nullopt;
  }
  auto s = it->is_string() ? it->get<std::string>() : it->dump();
  if (s.empty()) {
    return std::nullopt;
  }
  return s;
}

class DocumentCache {
 public:
  const std::string& read(const fs::path& p) {
    auto key = p.lexically_normal().string();
    if (auto it = cache_.find(key); it != cache_.end()) {
      return it->second;
    }
    std::ifstream in{p, std::ios::binary};
    if (!in) {
      throw ValidationError("cannot read document " + p.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return cache_.emplace(key, ss.str()).first->second;
  }

 private:
  std::map<std::string, std::string> cache_;
};

EprintId ingest_line(Repository& repo, const json& j, const fs::path& base_dir, DocumentCache& docs,
                     Timestamp now) {
  EprintMetadata m;
  m.title = j.at("title").get<std::string>();
  m.creators = j.at("creators").get<std::vector<std::string>>();
  m.year = j.at("year").get<int>();
  if (j.contains("venue")) {
    m.venue = j.at("venue").get<VenueRef>();
  } else {
    auto kind = parse_venue_kind(j.value("venue_kind", std::string{"journal_article"}));
    if (!kind) {
      throw ValidationError("venue_kind must be journal_article or book_chapter");
    }
    m.venue.kind = *kind;
    m.venue.container_title = j.value("container_title", std::string{});
    m.venue.volume = optional_text(j, "volume");
    m.venue.issue = optional_text(j, "issue");
    m.venue.chapter = optional_text(j, "chapter");
    m.venue.pages = optional_text(j, "pages");
  }
  m.vor_identifier = optional_text(j, "vor_identifier");

  AccessState access;
  const auto kind = j.value("access", std::string{"closed"});
  if (kind == "open") {
    access = OpenAccess{};
  } else if (kind == "closed") {
    ClosedAccess closed;
    if (auto e = optional_text(j, "embargo_until")) {
      closed.embargo_until = parse_date(*e);
      if (!closed.embargo_until) {
        throw ValidationError("embargo_until is not an ISO-8601 date: " + *e);
      }
    }
    access = closed;
  } else {
    throw ValidationError("access must be open or closed");
  }

  const auto& dj = j.at("depositor");
  Depositor depositor;
  depositor.display_name = dj.value("name", std::string{});
  depositor.contact_address = dj.at("email").get<std::string>();
  depositor.active = dj.value("active", true);
  depositor.fallback_address = optional_text(dj, "fallback_email");

  std::vector<Repository::Document> documents;
  for (const auto& d : j.at("documents")) {
    const auto path_text = d.is_string() ? d.get<std::string>() : d.at("path").get<std::string>();
    fs::path path{path_text};
    if (path.is_relative()) {
      path = base_dir / path;
    }
    Repository::Document doc;
    doc.label = d.is_object() ? d.value("label", path.filename().string()) : path.filename().string();
    doc.media_type = d.is_object() ? d.value("media_type", guess_media_type(path)) : guess_media_type(path);
    doc.bytes = docs.read(path);
    documents.push_back(std::move(doc));
  }

  Timestamp deposited_at = now;
  if (auto t = optional_text(j, "deposited_at")) {
    auto parsed = parse_timestamp(*t);
    if (!parsed) {
      throw ValidationError("deposited_at is not an ISO-8601 timestamp: " + *t);
    }
    deposited_at = *parsed;
  }
  return repo.deposit(std::move(m), std::move(depositor), documents, access, deposited_at);
}

}  // namespace

std::string guess_media_type(const fs::path& p) {
  static const std::map<std::string, std::string> kTypes{
      {".pdf", "application/pdf"},   {".txt", "text/plain"},       {".html", "text/html"},
      {".htm", "text/html"},         {".zip", "application/zip"},  {".ps", "application/postscript"},
      {".doc", "application/msword"}, {".xml", "application/xml"},
      {".docx", "application/vnd.openxmlformats-officedocument.wordprocessingml.document"},
      {".odt", "application/vnd.oasis.opendocument.text"}};
  auto ext = p.extension().string();
  for (auto& c : ext) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  auto it = kTypes.find(ext);
  return it == kTypes.end() ? "application/octet-stream" : it->second;
}

IngestReport ingest(Repository& repo, std::istream& in, const fs::path& base_dir, Timestamp now) {
  IngestReport report;
  DocumentCache docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      continue;
    }
    try {
      report.deposited.push_back(ingest_line(repo, json::parse(line), base_dir, docs, now));
    } catch (const json::exception& e) {
      report.errors.push_back({line_no, e.what()});
    } catch (const Error& e) {
      report.errors.push_back({line_no, e.what()});
    }
  }
  return report;
}

IngestReport ingest_file(Repository& repo, const fs::path& file, Timestamp now) {
  std::ifstream in{file};
  if (!in) {
    throw ValidationError("cannot read ingestion file " + file.string());
  }
  return ingest(repo, in, file.parent_path(), now);
}

}  // namespace almostoa
