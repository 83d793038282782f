#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace intent_cbr {

/// A subset of a frame of discernment, as a bit set over the frame's sorted
/// intention ids (bit i <-> frame()[i]). Only meaningful next to its frame.
class Subset {
public:
    constexpr Subset() = default;
    constexpr explicit Subset(std::uint64_t bits) : bits_(bits) {}

    constexpr std::uint64_t bits() const noexcept { return bits_; }
    constexpr bool empty() const noexcept { return bits_ == 0; }
    constexpr bool is_subset_of(Subset other) const noexcept { return (bits_ & ~other.bits_) == 0; }
    constexpr bool intersects(Subset other) const noexcept { return (bits_ & other.bits_) != 0; }

    friend constexpr Subset operator&(Subset a, Subset b) noexcept { return Subset(a.bits_ & b.bits_); }
    friend constexpr Subset operator|(Subset a, Subset b) noexcept { return Subset(a.bits_ | b.bits_); }
    friend constexpr auto operator<=>(Subset, Subset) = default;

private:
    std::uint64_t bits_ = 0;
};

/// Basic probability assignment over subsets of a frame of intention ids.
/// Construction enforces m >= 0, sum = 1 (within 1e-9) and m(empty) = 0;
/// zero-mass entries are dropped.
class MassFunction {
public:
    static constexpr std::size_t kMaxFrameSize = 64;

    MassFunction(std::vector<std::string> frame, std::map<Subset, double> masses);

    /// m(frame) = 1: total ignorance.
    static MassFunction vacuous(std::vector<std::string> frame);

    const std::vector<std::string>& frame() const noexcept { return frame_; }
    const std::map<Subset, double>& masses() const noexcept { return masses_; }

    double mass(Subset s) const noexcept;
    Subset full() const noexcept;
    /// Throws SubsetOutsideFrame for ids not in the frame.
    Subset subset_of(std::span<const std::string> ids) const;
    Subset singleton(std::string_view id) const;
    std::vector<std::string> members(Subset s) const;
    /// Sorted member ids joined by '|', the on-disk key for a focal element.
    std::string key(Subset s) const;
    Subset parse_key(std::string_view key) const;

    friend bool operator==(const MassFunction&, const MassFunction&) = default;

private:
    std::vector<std::string> frame_;
    std::map<Subset, double> masses_;
};

inline constexpr double kConflictTolerance = 1e-12;

/// Dempster's rule. Throws FrameMismatch when frames differ and TotalConflict
/// when the agreeing mass 1 - K is at most 1e-12.
MassFunction combine(const MassFunction& m1, const MassFunction& m2);

/// Conflict mass K between two mass functions on the same frame.
double conflict(const MassFunction& m1, const MassFunction& m2);

double belief(const MassFunction& m, Subset a);
double plausibility(const MassFunction& m, Subset a);
double belief(const MassFunction& m, std::span<const std::string> ids);
double plausibility(const MassFunction& m, std::span<const std::string> ids);

}  // namespace intent_cbr
