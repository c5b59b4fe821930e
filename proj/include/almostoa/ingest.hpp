#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "almostoa/repository.hpp"

namespace almostoa {

/// Batch deposit file: one JSON object per line.
///
///   {"title": "...", "creators": ["Gömann, Anissa", "..."], "year": 2009,
///    "venue_kind": "journal_article", "container_title": "Tetrahedron",
///    "volume": "65", "issue": "7", "pages": "1450-1454",
///    "access": "closed", "embargo_until": "2010-01-01",
///    "depositor": {"name": "...", "email": "...", "active": true},
///    "documents": ["paper.pdf", {"path": "data.zip", "label": "Data"}]}
///
/// embargo_until may be "" or absent. Document paths resolve against
/// `base_dir`. Blank lines and lines starting with '#' are skipped.
struct IngestLineError {
  std::size_t line = 0;
  std::string message;
};

struct IngestReport {
  std::vector<EprintId> deposited;
  std::vector<IngestLineError> errors;
};

IngestReport ingest(Repository& repo, std::istream& in, const std::filesystem::path& base_dir, Timestamp now);
IngestReport ingest_file(Repository& repo, const std::filesystem::path& file, Timestamp now);

std::string guess_media_type(const std::filesystem::path& p);

}  // namespace almostoa
