#include "intent_cbr/codec.hpp"

#include "intent_cbr/error.hpp"

#include <cmath>
#include <cstdio>

namespace intent_cbr {

namespace {

template <typename T>
T required(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw Json::other_error::create(501, std::string("missing field '") + key + "'", &j);
    }
    return j.at(key).get<T>();
}

void format_number(std::string& out, const Json& j) {
    if (j.is_number_integer()) {
        out += j.dump();
        return;
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw Error(ErrorCode::ValidationFailure, "non-finite number cannot be serialised");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
    out += buf;
}

void dump_into(std::string& out, const Json& j, int depth) {
    const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
    const std::string close_pad(static_cast<std::size_t>(depth) * 2, ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad;
                out += Json(key).dump();
                out += ": ";
                dump_into(out, value, depth + 1);
            }
            out += "\n" + close_pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& value : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad;
                dump_into(out, value, depth + 1);
            }
            out += "\n" + close_pad + "]";
            return;
        }
        case Json::value_t::number_float:
        case Json::value_t::number_integer:
        case Json::value_t::number_unsigned:
            format_number(out, j);
            return;
        default:
            out += j.dump();
            return;
    }
}

}  // namespace

void to_json(Json& j, const Evidence& v) {
    j = Json{{"id", v.id},
             {"kind", std::string(to_string(v.kind))},
             {"attributes", v.attributes},
             {"description", v.description},
             {"confidence", v.confidence}};
}

void from_json(const Json& j, Evidence& v) {
    v.id = required<std::string>(j, "id");
    const auto kind = required<std::string>(j, "kind");
    auto parsed = parse_evidence_kind(kind);
    if (!parsed) throw Json::other_error::create(501, "unknown evidence kind '" + kind + "'", &j);
    v.kind = *parsed;
    v.attributes = j.value("attributes", std::map<std::string, std::string>{});
    v.description = j.value("description", std::string{});
    v.confidence = j.value("confidence", 1.0);
}

void to_json(Json& j, const Attack& v) {
    j = Json{{"id", v.id}, {"name", v.name}, {"detection_state", v.detection_state}, {"evidence", v.evidence}};
}

void from_json(const Json& j, Attack& v) {
    v.id = required<std::string>(j, "id");
    v.name = j.value("name", v.id);
    v.detection_state = j.value("detection_state", 1.0);
    v.evidence = j.value("evidence", std::vector<Evidence>{});
}

void to_json(Json& j, const Intention& v) {
    j = Json{{"id", v.id}, {"label", v.label}, {"category", v.category ? Json(*v.category) : Json(nullptr)}};
}

void from_json(const Json& j, Intention& v) {
    v.id = required<std::string>(j, "id");
    v.label = required<std::string>(j, "label");
    if (j.contains("category") && !j.at("category").is_null()) {
        v.category = j.at("category").get<std::string>();
    } else {
        v.category.reset();
    }
}

void to_json(Json& j, const Hypothesis& v) {
    j = Json{{"id", v.id}, {"accuracy", v.accuracy}, {"applies_to", v.applies_to}};
}

void from_json(const Json& j, Hypothesis& v) {
    v.id = required<std::string>(j, "id");
    v.accuracy = required<double>(j, "accuracy");
    v.applies_to = j.value("applies_to", std::string(kAnyIntention));
}

void to_json(Json& j, const CausalNetwork& v) {
    j = Json{{"attack_id", v.attack_id},
             {"intentions", v.intentions},
             {"evidence_ids", v.evidence_ids},
             {"priors", v.priors},
             {"likelihoods", v.likelihoods}};
}

void from_json(const Json& j, CausalNetwork& v) {
    v.attack_id = required<std::string>(j, "attack_id");
    v.intentions = required<std::vector<Intention>>(j, "intentions");
    v.evidence_ids = required<std::vector<std::string>>(j, "evidence_ids");
    v.priors = j.value("priors", std::map<std::string, double>{});
    v.likelihoods = required<std::map<std::string, std::map<std::string, double>>>(j, "likelihoods");
}

void to_json(Json& j, const Case& v) {
    j = Json{{"case_id", v.case_id},
             {"attack", v.attack},
             {"intention", v.intention ? Json(*v.intention) : Json(nullptr)},
             {"evidence_weights", v.evidence_weights},
             {"status", std::string(to_string(v.status))},
             {"provenance", v.provenance},
             {"created_at", v.created_at}};
}

void from_json(const Json& j, Case& v) {
    v.case_id = required<std::string>(j, "case_id");
    v.attack = required<Attack>(j, "attack");
    if (j.contains("intention") && !j.at("intention").is_null()) {
        v.intention = j.at("intention").get<Intention>();
    } else {
        v.intention.reset();
    }
    v.evidence_weights = j.value("evidence_weights", std::map<std::string, double>{});
    const auto status = required<std::string>(j, "status");
    auto parsed = parse_case_status(status);
    if (!parsed) throw Json::other_error::create(501, "unknown case status '" + status + "'", &j);
    v.status = *parsed;
    v.provenance = j.value("provenance", std::string{});
    v.created_at = j.value("created_at", std::string{});
}

void to_json(Json& j, const AlignedPair& v) {
    j = Json{{"new_evidence_id", v.new_evidence_id},
             {"precedent_evidence_id", v.precedent_evidence_id},
             {"local_sim", v.local_sim}};
}

void to_json(Json& j, const SimilarityResult& v) {
    j = Json{{"new_case_id", v.new_case_id},
             {"precedent_case_id", v.precedent_case_id},
             {"alignment", v.alignment},
             {"score", v.score}};
}

void to_json(Json& j, const MassFunction& v) {
    Json masses = Json::object();
    for (const auto& [subset, value] : v.masses()) masses[v.key(subset)] = value;
    j = Json{{"frame", v.frame()}, {"masses", masses}};
}

MassFunction mass_function_from_json(const Json& j) {
    try {
        auto frame = required<std::vector<std::string>>(j, "frame");
        const MassFunction layout = MassFunction::vacuous(frame);
        std::map<Subset, double> masses;
        const auto entries = required<Json>(j, "masses");
        for (const auto& [key, value] : entries.items()) {
            masses[layout.parse_key(key)] += value.get<double>();
        }
        return MassFunction(std::move(frame), std::move(masses));
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::MalformedRecord, std::string("mass function: ") + e.what());
    }
}

namespace aia {
void to_json(Json& j, const BeliefReport& v) {
    Json per = Json::object();
    for (const auto& [id, interval] : v.per_intention) {
        per[id] = Json{{"belief", interval.belief}, {"plausibility", interval.plausibility}};
    }
    j = Json{{"per_intention", per}, {"selected", v.selected}, {"mass", v.mass}};
}
}  // namespace aia

std::string canonical_dump(const Json& j) {
    std::string out;
    dump_into(out, j, 0);
    out += '\n';
    return out;
}

Json parse_json(std::string_view text, std::string_view what) {
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::MalformedRecord, std::string(what) + ": " + e.what());
    }
}

template <typename T>
T decode(const Json& j, std::string_view what) {
    try {
        return j.get<T>();
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::MalformedRecord, std::string(what) + ": " + e.what());
    }
}

template Evidence decode<Evidence>(const Json&, std::string_view);
template Attack decode<Attack>(const Json&, std::string_view);
template Intention decode<Intention>(const Json&, std::string_view);
template Hypothesis decode<Hypothesis>(const Json&, std::string_view);
template CausalNetwork decode<CausalNetwork>(const Json&, std::string_view);
template Case decode<Case>(const Json&, std::string_view);
template std::vector<Hypothesis> decode<std::vector<Hypothesis>>(const Json&, std::string_view);

Case canonicalize(const Case& c) {
    return decode<Case>(parse_json(canonical_dump(Json(c)), c.case_id), c.case_id);
}

}  // namespace intent_cbr
