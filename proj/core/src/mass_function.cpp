#include "intent_cbr/mass_function.hpp"

#include "intent_cbr/error.hpp"
#include "intent_cbr/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace intent_cbr {

namespace {

std::vector<std::string> canonical_frame(std::vector<std::string> frame) {
    std::sort(frame.begin(), frame.end());
    if (std::adjacent_find(frame.begin(), frame.end()) != frame.end()) {
        throw Error(ErrorCode::ValidationFailure, "frame of discernment contains duplicate ids");
    }
    if (frame.empty()) throw Error(ErrorCode::ValidationFailure, "frame of discernment is empty");
    if (frame.size() > MassFunction::kMaxFrameSize) {
        throw Error(ErrorCode::ValidationFailure, "frame of discernment exceeds 64 intentions");
    }
    return frame;
}

std::uint64_t full_bits(std::size_t n) {
    return n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

}  // namespace

MassFunction::MassFunction(std::vector<std::string> frame, std::map<Subset, double> masses)
    : frame_(canonical_frame(std::move(frame))) {
    const Subset all(full_bits(frame_.size()));
    double total = 0.0;
    for (const auto& [subset, value] : masses) {
        if (subset.empty()) {
            if (value != 0.0) throw Error(ErrorCode::ValidationFailure, "mass on the empty set must be 0");
            continue;
        }
        if (!subset.is_subset_of(all)) {
            throw Error(ErrorCode::SubsetOutsideFrame, "focal element outside the frame");
        }
        if (!std::isfinite(value) || value < 0.0) {
            throw Error(ErrorCode::ValidationFailure, "masses must be finite and >= 0");
        }
        total += value;
        if (value > 0.0) masses_.emplace(subset, value);
    }
    if (!(std::abs(total - 1.0) <= kProbabilityTolerance)) {
        std::ostringstream msg;
        msg << "masses sum to " << total << ", expected 1";
        throw Error(ErrorCode::ValidationFailure, msg.str());
    }
}

MassFunction MassFunction::vacuous(std::vector<std::string> frame) {
    const std::size_t n = frame.size();
    return MassFunction(std::move(frame), {{Subset(full_bits(std::min<std::size_t>(n, 64))), 1.0}});
}

double MassFunction::mass(Subset s) const noexcept {
    auto it = masses_.find(s);
    return it == masses_.end() ? 0.0 : it->second;
}

Subset MassFunction::full() const noexcept { return Subset(full_bits(frame_.size())); }

Subset MassFunction::singleton(std::string_view id) const {
    auto it = std::lower_bound(frame_.begin(), frame_.end(), id);
    if (it == frame_.end() || *it != id) {
        throw Error(ErrorCode::SubsetOutsideFrame, "'" + std::string(id) + "' is not in the frame");
    }
    return Subset(std::uint64_t{1} << (it - frame_.begin()));
}

Subset MassFunction::subset_of(std::span<const std::string> ids) const {
    Subset out;
    for (const auto& id : ids) out = out | singleton(id);
    return out;
}

std::vector<std::string> MassFunction::members(Subset s) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < frame_.size(); ++i) {
        if (s.bits() & (std::uint64_t{1} << i)) out.push_back(frame_[i]);
    }
    return out;
}

std::string MassFunction::key(Subset s) const {
    std::string out;
    for (const auto& id : members(s)) {
        if (!out.empty()) out += '|';
        out += id;
    }
    return out;
}

Subset MassFunction::parse_key(std::string_view key) const {
    Subset out;
    std::size_t start = 0;
    while (start <= key.size()) {
        std::size_t bar = key.find('|', start);
        if (bar == std::string_view::npos) bar = key.size();
        out = out | singleton(key.substr(start, bar - start));
        start = bar + 1;
    }
    return out;
}

double conflict(const MassFunction& m1, const MassFunction& m2) {
    if (m1.frame() != m2.frame()) throw Error(ErrorCode::FrameMismatch, "mass functions use different frames");
    double k = 0.0;
    for (const auto& [b, mb] : m1.masses()) {
        for (const auto& [c, mc] : m2.masses()) {
            if (!b.intersects(c)) k += mb * mc;
        }
    }
    return k;
}

MassFunction combine(const MassFunction& m1, const MassFunction& m2) {
    if (m1.frame() != m2.frame()) throw Error(ErrorCode::FrameMismatch, "mass functions use different frames");

    std::map<Subset, double> joint;
    double agreement = 0.0;
    for (const auto& [b, mb] : m1.masses()) {
        for (const auto& [c, mc] : m2.masses()) {
            const Subset a = b & c;
            if (a.empty()) continue;
            joint[a] += mb * mc;
            agreement += mb * mc;
        }
    }
    if (agreement <= kConflictTolerance) {
        throw Error(ErrorCode::TotalConflict, "the two bodies of evidence are fully contradictory");
    }
    for (auto& [a, value] : joint) value /= agreement;
    return MassFunction(m1.frame(), std::move(joint));
}

double belief(const MassFunction& m, Subset a) {
    if (!a.is_subset_of(m.full())) throw Error(ErrorCode::SubsetOutsideFrame, "subset outside the frame");
    double sum = 0.0;
    for (const auto& [b, mb] : m.masses()) {
        if (b.is_subset_of(a)) sum += mb;
    }
    return sum;
}

double plausibility(const MassFunction& m, Subset a) {
    if (!a.is_subset_of(m.full())) throw Error(ErrorCode::SubsetOutsideFrame, "subset outside the frame");
    double sum = 0.0;
    for (const auto& [b, mb] : m.masses()) {
        if (b.intersects(a)) sum += mb;
    }
    return sum;
}

double belief(const MassFunction& m, std::span<const std::string> ids) { return belief(m, m.subset_of(ids)); }

double plausibility(const MassFunction& m, std::span<const std::string> ids) {
    return plausibility(m, m.subset_of(ids));
}

}  // namespace intent_cbr
