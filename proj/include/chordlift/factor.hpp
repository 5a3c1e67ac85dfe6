#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace chordlift {

// The four explanatory factors the analyses slice by.
enum class Factor { Category, Genre, Era, Region };

inline constexpr std::array<Factor, 4> kAllFactors = {Factor::Category, Factor::Genre,
                                                      Factor::Era, Factor::Region};

inline constexpr std::string_view factor_name(Factor f) {
    switch (f) {
        case Factor::Category: return "category";
        case Factor::Genre: return "genre";
        case Factor::Era: return "era";
        case Factor::Region: return "region";
    }
    return "category";
}

inline std::optional<Factor> factor_from_name(std::string_view name) {
    for (Factor f : kAllFactors)
        if (factor_name(f) == name) return f;
    return std::nullopt;
}

}  // namespace chordlift
