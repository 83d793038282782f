#include "intent_cbr/ingest.hpp"

#include "intent_cbr/codec.hpp"
#include "intent_cbr/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

namespace intent_cbr::ingest {

namespace {

constexpr std::array<std::pair<std::string_view, EvidenceKind>, 36> kAliases{{
    {"port-exploit", EvidenceKind::PortExploit},
    {"port", EvidenceKind::PortExploit},
    {"ports", EvidenceKind::PortExploit},
    {"exploit-port", EvidenceKind::PortExploit},
    {"exploit", EvidenceKind::PortExploit},
    {"function-implementation", EvidenceKind::FunctionImplementation},
    {"function", EvidenceKind::FunctionImplementation},
    {"functions", EvidenceKind::FunctionImplementation},
    {"implementation", EvidenceKind::FunctionImplementation},
    {"feature", EvidenceKind::FunctionImplementation},
    {"tool-usage", EvidenceKind::ToolUsage},
    {"tool", EvidenceKind::ToolUsage},
    {"tools", EvidenceKind::ToolUsage},
    {"malware", EvidenceKind::ToolUsage},
    {"command-usage", EvidenceKind::CommandUsage},
    {"command", EvidenceKind::CommandUsage},
    {"commands", EvidenceKind::CommandUsage},
    {"cmd", EvidenceKind::CommandUsage},
    {"registry-access", EvidenceKind::RegistryAccess},
    {"registry", EvidenceKind::RegistryAccess},
    {"address-indicator", EvidenceKind::AddressIndicator},
    {"address", EvidenceKind::AddressIndicator},
    {"ip", EvidenceKind::AddressIndicator},
    {"ip-address", EvidenceKind::AddressIndicator},
    {"source-ip", EvidenceKind::AddressIndicator},
    {"destination-ip", EvidenceKind::AddressIndicator},
    {"protocol-indicator", EvidenceKind::ProtocolIndicator},
    {"protocol", EvidenceKind::ProtocolIndicator},
    {"protocols", EvidenceKind::ProtocolIndicator},
    {"vulnerability-indicator", EvidenceKind::VulnerabilityIndicator},
    {"vulnerability", EvidenceKind::VulnerabilityIndicator},
    {"vuln", EvidenceKind::VulnerabilityIndicator},
    {"cve", EvidenceKind::VulnerabilityIndicator},
    {"other", EvidenceKind::Other},
    {"misc", EvidenceKind::Other},
    {"unknown", EvidenceKind::Other},
}};

std::string normalize_kind(std::string_view raw) {
    std::string out;
    for (char ch : raw) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            if (!out.empty() && out.back() != '-') out += '-';
        } else if (ch == '_') {
            out += '-';
        } else {
            out += static_cast<char>(std::tolower(c));
        }
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

std::string where(std::size_t line) { return "line " + std::to_string(line); }

double parse_confidence(const std::string& cell, const std::string& location) {
    const std::string text = trim(cell);
    if (text.empty()) return 1.0;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw Error(ErrorCode::MalformedRecord, location + ": confidence '" + text + "' is not a number");
    }
    if (value < 0.0 || value > 1.0) {
        throw Error(ErrorCode::ConfidenceOutOfRange, location + ": confidence " + text + " outside [0,1]");
    }
    return value;
}

void add_evidence(IngestResult& result, std::set<std::string>& seen, Evidence ev, const std::string& raw_kind,
                  const std::string& location) {
    if (ev.id.empty()) throw Error(ErrorCode::MalformedRecord, location + ": evidence id is empty");
    if (!seen.insert(ev.id).second) {
        throw Error(ErrorCode::DuplicateEvidenceId, location + ": evidence id '" + ev.id + "' repeats");
    }
    if (!is_known_kind(raw_kind)) {
        result.warnings.push_back(location + ": unknown evidence kind '" + raw_kind + "', using 'other'");
    }
    result.attack.evidence.push_back(std::move(ev));
}

IngestResult parse_csv(std::string_view text, std::string_view attack_id) {
    const auto rows = read_csv(text);
    if (rows.empty()) throw Error(ErrorCode::MalformedRecord, "line 1: empty file, a header row is required");

    const auto& header = rows.front();
    static constexpr std::array<std::string_view, 4> kColumns{"id", "kind", "description", "confidence"};
    if (header.fields.size() < kColumns.size()) {
        throw Error(ErrorCode::MalformedRecord, where(header.line) + ": header must start with id,kind,description,confidence");
    }
    for (std::size_t i = 0; i < kColumns.size(); ++i) {
        if (lower(trim(header.fields[i])) != kColumns[i]) {
            throw Error(ErrorCode::MalformedRecord, where(header.line) + ": expected column '" +
                                                        std::string(kColumns[i]) + "', found '" +
                                                        header.fields[i] + "'");
        }
    }

    IngestResult result;
    result.attack.id = std::string(attack_id);
    result.attack.name = std::string(attack_id);
    std::set<std::string> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string location = where(row.line);
        if (row.fields.size() == 1 && trim(row.fields[0]).empty()) continue;  // blank line
        if (row.fields.size() < 2) throw Error(ErrorCode::MalformedRecord, location + ": too few columns");

        Evidence ev;
        ev.id = trim(row.fields[0]);
        const std::string raw_kind = trim(row.fields[1]);
        ev.kind = map_kind(raw_kind);
        ev.description = row.fields.size() > 2 ? row.fields[2] : std::string{};
        ev.confidence = parse_confidence(row.fields.size() > 3 ? row.fields[3] : std::string{}, location);
        for (std::size_t c = 4; c < row.fields.size(); ++c) {
            const std::string cell = trim(row.fields[c]);
            if (cell.empty()) continue;
            const auto eq = cell.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw Error(ErrorCode::MalformedRecord, location + ": attribute '" + cell + "' is not key=value");
            }
            const std::string key = trim(std::string_view(cell).substr(0, eq));
            if (!ev.attributes.emplace(key, trim(std::string_view(cell).substr(eq + 1))).second) {
                throw Error(ErrorCode::MalformedRecord, location + ": attribute '" + key + "' repeats");
            }
        }
        add_evidence(result, seen, std::move(ev), raw_kind, location);
    }
    if (result.attack.evidence.empty()) {
        throw Error(ErrorCode::MalformedRecord, where(rows.back().line) + ": no evidence records");
    }
    return result;
}

IngestResult parse_json_document(std::string_view text, std::string_view fallback_id) {
    const Json doc = parse_json(text, "evidence file");
    if (!doc.is_object() || !doc.contains("evidence") || !doc.at("evidence").is_array()) {
        throw Error(ErrorCode::MalformedRecord, "record 0: expected an object with an 'evidence' array");
    }
    IngestResult result;
    result.attack.id = std::string(fallback_id);
    result.attack.name = std::string(fallback_id);
    try {
        if (doc.contains("attack")) {
            const Json& meta = doc.at("attack");
            result.attack.id = meta.value("id", result.attack.id);
            result.attack.name = meta.value("name", result.attack.id);
            result.attack.detection_state = meta.value("detection_state", 1.0);
        }
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::MalformedRecord, std::string("attack metadata: ") + e.what());
    }
    if (!(result.attack.detection_state >= 0.0 && result.attack.detection_state <= 1.0)) {
        throw Error(ErrorCode::ConfidenceOutOfRange, "attack metadata: detection_state outside [0,1]");
    }

    std::set<std::string> seen;
    std::size_t index = 0;
    for (const auto& record : doc.at("evidence")) {
        const std::string location = "record " + std::to_string(++index);
        Evidence ev;
        std::string raw_kind;
        try {
            if (!record.is_object()) throw Error(ErrorCode::MalformedRecord, location + ": not an object");
            ev.id = record.at("id").get<std::string>();
            raw_kind = record.value("kind", std::string("other"));
            ev.kind = map_kind(raw_kind);
            ev.description = record.value("description", std::string{});
            ev.attributes = record.value("attributes", std::map<std::string, std::string>{});
            ev.confidence = record.value("confidence", 1.0);
        } catch (const Json::exception& e) {
            throw Error(ErrorCode::MalformedRecord, location + ": " + e.what());
        }
        if (!std::isfinite(ev.confidence) || ev.confidence < 0.0 || ev.confidence > 1.0) {
            throw Error(ErrorCode::ConfidenceOutOfRange, location + ": confidence outside [0,1]");
        }
        add_evidence(result, seen, std::move(ev), raw_kind, location);
    }
    if (result.attack.evidence.empty()) throw Error(ErrorCode::MalformedRecord, "record 0: no evidence records");
    return result;
}

}  // namespace

EvidenceKind map_kind(std::string_view raw_kind) {
    const std::string key = normalize_kind(raw_kind);
    for (const auto& [alias, kind] : kAliases) {
        if (alias == key) return kind;
    }
    return EvidenceKind::Other;
}

bool is_known_kind(std::string_view raw_kind) {
    const std::string key = normalize_kind(raw_kind);
    return std::any_of(kAliases.begin(), kAliases.end(), [&](const auto& a) { return a.first == key; });
}

std::vector<CsvRow> read_csv(std::string_view text) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    std::vector<CsvRow> rows;
    std::size_t line = 1;
    std::size_t i = 0;
    while (i < text.size()) {
        CsvRow row{line, {}};
        std::string field;
        bool quoted = false;
        bool row_done = false;
        while (!row_done) {
            if (i >= text.size()) {
                if (quoted) throw Error(ErrorCode::MalformedRecord, where(row.line) + ": unterminated quoted field");
                row.fields.push_back(std::move(field));
                break;
            }
            const char ch = text[i];
            if (quoted) {
                if (ch == '"') {
                    if (i + 1 < text.size() && text[i + 1] == '"') {
                        field += '"';
                        i += 2;
                    } else {
                        quoted = false;
                        ++i;
                    }
                } else {
                    if (ch == '\n') ++line;
                    field += ch;
                    ++i;
                }
                continue;
            }
            switch (ch) {
                case '"':
                    if (!field.empty()) {
                        throw Error(ErrorCode::MalformedRecord, where(line) + ": stray quote inside a field");
                    }
                    quoted = true;
                    ++i;
                    break;
                case ',':
                    row.fields.push_back(std::move(field));
                    field.clear();
                    ++i;
                    break;
                case '\r':
                    ++i;
                    break;
                case '\n':
                    row.fields.push_back(std::move(field));
                    ++i;
                    ++line;
                    row_done = true;
                    break;
                default:
                    field += ch;
                    ++i;
                    break;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

IngestResult parse_evidence_text(std::string_view text, Format format, std::string_view attack_id) {
    IngestResult result = format == Format::Csv ? parse_csv(text, attack_id) : parse_json_document(text, attack_id);
    if (auto violations = validate_attack(result.attack); !violations.empty()) {
        throw Error(ErrorCode::ValidationFailure, describe(violations));
    }
    return result;
}

IngestResult parse_evidence_file(const std::filesystem::path& path, Format format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::IoFailure, "error while reading " + path.string());
    return parse_evidence_text(ss.str(), format, path.stem().string());
}

Format format_from_path(const std::filesystem::path& path) {
    const std::string ext = lower(path.extension().string());
    if (ext == ".csv") return Format::Csv;
    if (ext == ".json") return Format::Json;
    throw Error(ErrorCode::ValidationFailure, "cannot infer the format of " + path.string() + " (use .csv or .json)");
}

std::string serialize_attack(const Attack& attack) {
    Json doc{{"attack", Json{{"id", attack.id}, {"name", attack.name}, {"detection_state", attack.detection_state}}},
             {"evidence", attack.evidence}};
    return canonical_dump(doc);
}

}  // namespace intent_cbr::ingest
