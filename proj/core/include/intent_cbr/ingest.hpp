#pragma once

#include "intent_cbr/model.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace intent_cbr::ingest {

enum class Format { Json, Csv };

/// Case-insensitive lookup in a fixed alias table ("tool" -> tool-usage,
/// "registry" -> registry-access, ...). Anything unknown is `Other`.
EvidenceKind map_kind(std::string_view raw_kind);
/// Whether `raw_kind` is in the alias table at all.
bool is_known_kind(std::string_view raw_kind);

struct IngestResult {
    Attack attack;
    /// Non-fatal notes, e.g. unknown kinds that were mapped to `other`.
    std::vector<std::string> warnings;
};

/// CSV: header row `id,kind,description,confidence[,attribute columns...]`,
/// attribute cells written as key=value; RFC 4180 quoting. An empty
/// confidence cell means 1.0. The attack id and name default to `attack_id`.
///
/// JSON: {"attack": {"id", "name", "detection_state"}, "evidence": [...]}.
///
/// Throws MalformedRecord (with line or record number), DuplicateEvidenceId,
/// ConfidenceOutOfRange. At least one evidence record is required.
IngestResult parse_evidence_text(std::string_view text, Format format, std::string_view attack_id);

/// Reads `path` and parses it; CSV attacks are named after the file stem.
/// Throws IoFailure when the file cannot be read.
IngestResult parse_evidence_file(const std::filesystem::path& path, Format format);

/// Picks the format from the extension (.csv / .json); throws ValidationFailure otherwise.
Format format_from_path(const std::filesystem::path& path);

/// The JSON ingest document for an attack; parse_evidence_text inverts it.
std::string serialize_attack(const Attack& attack);

/// Minimal RFC 4180 reader: fields split on commas, double-quote escaping,
/// CRLF or LF line ends. Each row carries the line it starts on.
struct CsvRow {
    std::size_t line = 0;
    std::vector<std::string> fields;
};
std::vector<CsvRow> read_csv(std::string_view text);

}  // namespace intent_cbr::ingest
