#pragma once

#include "intent_cbr/model.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace intent_cbr {

/// Directory-backed store of cases, ingested attacks and causal networks:
///
///   <root>/meta.json                 {"schema_version": 1}
///   <root>/cases/<case_id>.json
///   <root>/attacks/<attack_id>.json
///   <root>/networks/<attack_id>.json
///
/// Every write goes to a dot-prefixed temp file that is renamed into place,
/// so a reader never sees a half-written record. Mutations hold an exclusive
/// flock on meta.json; const members are safe to call concurrently.
class RepositoryHandle {
public:
    static constexpr int kSchemaVersion = 1;

    /// Creates the layout when missing. Throws IoFailure, SchemaVersionMismatch,
    /// or CorruptRecord listing every record that fails to decode or validate.
    static RepositoryHandle open(const std::filesystem::path& root);

    const std::filesystem::path& root_path() const noexcept { return root_; }
    int schema_version() const noexcept { return schema_version_; }
    /// case_id -> file name under cases/.
    const std::map<std::string, std::string>& index() const noexcept { return index_; }

    /// Throws ValidationFailure or DuplicateCaseId.
    void add_case(const Case& c);
    /// Overwrites an existing case (status changes during revise/retain).
    /// Throws ValidationFailure or UnknownCaseId.
    void update_case(const Case& c);
    bool contains_case(std::string_view case_id) const noexcept;
    /// Throws UnknownCaseId.
    Case get_case(std::string_view case_id) const;
    /// Ordered by case_id.
    std::vector<Case> list_cases(std::optional<CaseStatus> status_filter = std::nullopt) const;
    /// Precedent and retained cases.
    std::vector<Case> confirmed_cases() const;
    std::size_t case_count() const noexcept { return cases_.size(); }
    std::size_t confirmed_count() const noexcept;

    /// Normalised frequency of each intention id over confirmed cases.
    /// Throws EmptyRepository when there are none.
    std::map<std::string, double> intention_frequencies() const;

    /// Throws ValidationFailure or DuplicateCaseId (attack ids share the case-id namespace rules).
    void add_attack(const Attack& attack);
    bool contains_attack(std::string_view attack_id) const noexcept;
    Attack get_attack(std::string_view attack_id) const;

    void put_network(const CausalNetwork& network);
    std::optional<CausalNetwork> get_network(std::string_view attack_id) const;

    /// Test seam: runs after the temp file is written and before it is renamed.
    using BeforeRenameHook =
        std::function<void(const std::filesystem::path& temp, const std::filesystem::path& target)>;
    void set_before_rename_hook(BeforeRenameHook hook) { before_rename_ = std::move(hook); }

private:
    explicit RepositoryHandle(std::filesystem::path root) : root_(std::move(root)) {}

    void write_record(const std::filesystem::path& target, const std::string& text) const;

    std::filesystem::path root_;
    int schema_version_ = kSchemaVersion;
    std::map<std::string, std::string> index_;
    std::map<std::string, Case> cases_;
    std::map<std::string, Attack> attacks_;
    std::map<std::string, CausalNetwork> networks_;
    BeforeRenameHook before_rename_;
};

}  // namespace intent_cbr
