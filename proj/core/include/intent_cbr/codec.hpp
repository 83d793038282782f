#pragma once

#include "intent_cbr/aia.hpp"
#include "intent_cbr/mass_function.hpp"
#include "intent_cbr/model.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

// JSON schema shared by the repository, ingest and the CLI. Field names follow
// the domain types one-to-one; mass-function focal elements are keyed by their
// sorted member ids joined with '|'.
namespace intent_cbr {

using Json = nlohmann::json;

void to_json(Json& j, const Evidence& v);
void from_json(const Json& j, Evidence& v);
void to_json(Json& j, const Attack& v);
void from_json(const Json& j, Attack& v);
void to_json(Json& j, const Intention& v);
void from_json(const Json& j, Intention& v);
void to_json(Json& j, const Hypothesis& v);
void from_json(const Json& j, Hypothesis& v);
void to_json(Json& j, const CausalNetwork& v);
void from_json(const Json& j, CausalNetwork& v);
void to_json(Json& j, const Case& v);
void from_json(const Json& j, Case& v);
void to_json(Json& j, const AlignedPair& v);
void to_json(Json& j, const SimilarityResult& v);
void to_json(Json& j, const MassFunction& v);
MassFunction mass_function_from_json(const Json& j);

namespace aia {
void to_json(Json& j, const BeliefReport& v);
}

/// Sorted keys, two-space indent, reals printed with 12 significant digits,
/// trailing newline. Byte-stable: canonical_dump(parse(canonical_dump(x)))
/// reproduces its input.
std::string canonical_dump(const Json& j);

/// Parses a document and decodes it, turning any JSON or schema error into
/// Error(MalformedRecord) tagged with `what`.
template <typename T>
T decode(const Json& j, std::string_view what);

Json parse_json(std::string_view text, std::string_view what);

/// Round-trip through the canonical text form, so in-memory values match what
/// a later read from disk yields.
Case canonicalize(const Case& c);

}  // namespace intent_cbr
