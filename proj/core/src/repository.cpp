#include "intent_cbr/repository.hpp"

#include "intent_cbr/codec.hpp"
#include "intent_cbr/error.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace intent_cbr {

namespace {

constexpr const char* kMetaFile = "meta.json";
constexpr const char* kCasesDir = "cases";
constexpr const char* kAttacksDir = "attacks";
constexpr const char* kNetworksDir = "networks";

/// Exclusive advisory lock on meta.json for the lifetime of the object.
class WriterLock {
public:
    explicit WriterLock(const fs::path& meta) {
        fd_ = ::open(meta.c_str(), O_RDWR | O_CLOEXEC);
        if (fd_ < 0 || ::flock(fd_, LOCK_EX) != 0) {
            const std::string reason = std::strerror(errno);
            if (fd_ >= 0) ::close(fd_);
            throw Error(ErrorCode::IoFailure, "cannot lock " + meta.string() + ": " + reason);
        }
    }
    ~WriterLock() {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
    WriterLock(const WriterLock&) = delete;
    WriterLock& operator=(const WriterLock&) = delete;

private:
    int fd_ = -1;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw Error(ErrorCode::IoFailure, "cannot create directory " + dir.string() + ": " + ec.message());
    }
}

bool is_record_file(const fs::directory_entry& entry) {
    const auto name = entry.path().filename().string();
    return entry.is_regular_file() && !name.empty() && name.front() != '.' && entry.path().extension() == ".json";
}

template <typename T>
std::map<std::string, T> load_directory(const fs::path& dir, std::vector<std::string>& corrupt,
                                        const std::function<std::string(const T&)>& id_of,
                                        const std::function<std::vector<Violation>(const T&)>& validate) {
    std::map<std::string, T> out;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (!is_record_file(entry)) continue;
        const std::string stem = entry.path().stem().string();
        try {
            T value = decode<T>(parse_json(read_file(entry.path()), stem), stem);
            if (id_of(value) != stem) {
                corrupt.push_back(stem + " (id does not match file name)");
                continue;
            }
            if (auto violations = validate(value); !violations.empty()) {
                corrupt.push_back(stem + " (" + describe(violations) + ")");
                continue;
            }
            out.emplace(stem, std::move(value));
        } catch (const Error& e) {
            corrupt.push_back(stem + " (" + e.what() + ")");
        }
    }
    if (ec) throw Error(ErrorCode::IoFailure, "cannot list " + dir.string() + ": " + ec.message());
    return out;
}

}  // namespace

RepositoryHandle RepositoryHandle::open(const fs::path& root) {
    RepositoryHandle handle(root);
    ensure_directory(root);
    for (const char* sub : {kCasesDir, kAttacksDir, kNetworksDir}) ensure_directory(root / sub);

    const fs::path meta = root / kMetaFile;
    if (!fs::exists(meta)) {
        handle.write_record(meta, canonical_dump(Json{{"schema_version", kSchemaVersion}}));
    }
    const Json meta_doc = parse_json(read_file(meta), kMetaFile);
    if (!meta_doc.is_object() || !meta_doc.contains("schema_version") ||
        !meta_doc.at("schema_version").is_number_integer()) {
        throw Error(ErrorCode::CorruptRecord, "meta.json lacks an integer schema_version");
    }
    handle.schema_version_ = meta_doc.at("schema_version").get<int>();
    if (handle.schema_version_ != kSchemaVersion) {
        throw Error(ErrorCode::SchemaVersionMismatch, "repository schema_version " +
                                                          std::to_string(handle.schema_version_) + ", expected " +
                                                          std::to_string(kSchemaVersion));
    }

    std::vector<std::string> corrupt;
    handle.cases_ = load_directory<Case>(
        root / kCasesDir, corrupt, [](const Case& c) { return c.case_id; }, validate_case);
    handle.attacks_ = load_directory<Attack>(
        root / kAttacksDir, corrupt, [](const Attack& a) { return a.id; }, validate_attack);
    handle.networks_ = load_directory<CausalNetwork>(
        root / kNetworksDir, corrupt, [](const CausalNetwork& n) { return n.attack_id; }, validate_network);
    if (!corrupt.empty()) {
        std::string msg = "corrupt records:";
        for (const auto& c : corrupt) msg += " " + c + ";";
        msg.pop_back();
        throw Error(ErrorCode::CorruptRecord, msg);
    }
    for (const auto& [id, c] : handle.cases_) handle.index_[id] = id + ".json";
    return handle;
}

void RepositoryHandle::write_record(const fs::path& target, const std::string& text) const {
    const fs::path temp = target.parent_path() / ("." + target.filename().string() + ".tmp");
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + temp.string());
        out << text;
        out.flush();
        if (!out) throw Error(ErrorCode::IoFailure, "short write to " + temp.string());
    }
    if (before_rename_) before_rename_(temp, target);
    std::error_code ec;
    fs::rename(temp, target, ec);
    if (ec) {
        fs::remove(temp, ec);
        throw Error(ErrorCode::IoFailure, "cannot rename into " + target.string());
    }
}

void RepositoryHandle::add_case(const Case& c) {
    if (auto violations = validate_case(c); !violations.empty()) {
        throw Error(ErrorCode::ValidationFailure, "case '" + c.case_id + "': " + describe(violations));
    }
    WriterLock lock(root_ / kMetaFile);
    const fs::path target = root_ / kCasesDir / (c.case_id + ".json");
    if (cases_.count(c.case_id) || fs::exists(target)) {
        throw Error(ErrorCode::DuplicateCaseId, "case '" + c.case_id + "' already exists");
    }
    const Case stored = canonicalize(c);
    write_record(target, canonical_dump(Json(stored)));
    cases_.emplace(c.case_id, stored);
    index_[c.case_id] = c.case_id + ".json";
}

void RepositoryHandle::update_case(const Case& c) {
    if (auto violations = validate_case(c); !violations.empty()) {
        throw Error(ErrorCode::ValidationFailure, "case '" + c.case_id + "': " + describe(violations));
    }
    WriterLock lock(root_ / kMetaFile);
    auto it = cases_.find(c.case_id);
    if (it == cases_.end()) throw Error(ErrorCode::UnknownCaseId, "no case '" + c.case_id + "'");
    const Case stored = canonicalize(c);
    write_record(root_ / kCasesDir / (c.case_id + ".json"), canonical_dump(Json(stored)));
    it->second = stored;
}

bool RepositoryHandle::contains_case(std::string_view case_id) const noexcept {
    return cases_.count(std::string(case_id)) != 0;
}

Case RepositoryHandle::get_case(std::string_view case_id) const {
    auto it = cases_.find(std::string(case_id));
    if (it == cases_.end()) throw Error(ErrorCode::UnknownCaseId, "no case '" + std::string(case_id) + "'");
    return it->second;
}

std::vector<Case> RepositoryHandle::list_cases(std::optional<CaseStatus> status_filter) const {
    std::vector<Case> out;
    for (const auto& [id, c] : cases_) {
        if (!status_filter || c.status == *status_filter) out.push_back(c);
    }
    return out;
}

std::vector<Case> RepositoryHandle::confirmed_cases() const {
    std::vector<Case> out;
    for (const auto& [id, c] : cases_) {
        if (is_confirmed(c.status)) out.push_back(c);
    }
    return out;
}

std::size_t RepositoryHandle::confirmed_count() const noexcept {
    std::size_t n = 0;
    for (const auto& [id, c] : cases_) n += is_confirmed(c.status) ? 1 : 0;
    return n;
}

std::map<std::string, double> RepositoryHandle::intention_frequencies() const {
    std::map<std::string, double> counts;
    double total = 0.0;
    for (const auto& [id, c] : cases_) {
        if (!is_confirmed(c.status) || !c.intention) continue;
        counts[c.intention->id] += 1.0;
        total += 1.0;
    }
    if (total == 0.0) throw Error(ErrorCode::EmptyRepository, "repository holds no confirmed cases");
    for (auto& [id, n] : counts) n /= total;
    return counts;
}

void RepositoryHandle::add_attack(const Attack& attack) {
    auto violations = validate_attack(attack);
    if (!is_safe_identifier(attack.id)) violations.push_back({"attack.id", "must use only [A-Za-z0-9._-]"});
    if (!violations.empty()) {
        throw Error(ErrorCode::ValidationFailure, "attack '" + attack.id + "': " + describe(violations));
    }
    WriterLock lock(root_ / kMetaFile);
    const fs::path target = root_ / kAttacksDir / (attack.id + ".json");
    if (attacks_.count(attack.id) || fs::exists(target)) {
        throw Error(ErrorCode::DuplicateCaseId, "attack '" + attack.id + "' already ingested");
    }
    const std::string text = canonical_dump(Json(attack));
    write_record(target, text);
    attacks_.emplace(attack.id, decode<Attack>(parse_json(text, attack.id), attack.id));
}

bool RepositoryHandle::contains_attack(std::string_view attack_id) const noexcept {
    return attacks_.count(std::string(attack_id)) != 0;
}

Attack RepositoryHandle::get_attack(std::string_view attack_id) const {
    auto it = attacks_.find(std::string(attack_id));
    if (it == attacks_.end()) {
        throw Error(ErrorCode::UnknownCaseId, "no ingested attack '" + std::string(attack_id) + "'");
    }
    return it->second;
}

void RepositoryHandle::put_network(const CausalNetwork& network) {
    auto violations = validate_network(network);
    if (!is_safe_identifier(network.attack_id)) {
        violations.push_back({"attack_id", "must use only [A-Za-z0-9._-]"});
    }
    if (!violations.empty()) throw Error(ErrorCode::ValidationFailure, "causal network: " + describe(violations));
    WriterLock lock(root_ / kMetaFile);
    const std::string text = canonical_dump(Json(network));
    write_record(root_ / kNetworksDir / (network.attack_id + ".json"), text);
    networks_[network.attack_id] = decode<CausalNetwork>(parse_json(text, network.attack_id), network.attack_id);
}

std::optional<CausalNetwork> RepositoryHandle::get_network(std::string_view attack_id) const {
    auto it = networks_.find(std::string(attack_id));
    if (it == networks_.end()) return std::nullopt;
    return it->second;
}

}  // namespace intent_cbr
