#pragma once

#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "ssc/error.hpp"

namespace ssc {

enum class NameRole { Input, Range, Function };

namespace detail {

inline bool starts_with(std::string_view s, std::string_view p) {
    return s.substr(0, p.size()) == p;
}

inline std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return out;
}

// Anything a formula could read as a cell address, in any letter case.
inline bool looks_like_address(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) {
        ++i;
    }
    if (i == 0 || i > 3 || i == s.size()) {
        return false;
    }
    for (std::size_t j = i; j < s.size(); ++j) {
        if (!std::isdigit(static_cast<unsigned char>(s[j]))) {
            return false;
        }
    }
    return true;
}

inline bool is_reserved_word(std::string_view s) {
    auto u = upper(s);
    return u == "SUM" || u == "SELECT";
}

} // namespace detail

/// Label with the "Add "/"Less " lead word removed. Used both for names and
/// for the Input sheet, where operator words have no meaning.
inline std::string strip_operator_word(std::string_view label) {
    if (detail::starts_with(label, "Add ")) {
        label.remove_prefix(4);
    } else if (detail::starts_with(label, "Less ")) {
        label.remove_prefix(5);
    }
    return std::string(label);
}

/// PascalCase core of a derived name, or nullopt when nothing survives.
inline std::optional<std::string> try_derive_base_name(const std::string& label) {
    std::string_view s = label;
    std::string stripped = strip_operator_word(s);
    s = stripped;
    if (s.size() >= 2 && s.substr(s.size() - 2) == " *") {
        s.remove_suffix(2);
    }
    std::string out;
    bool word_start = true;
    for (char ch : s) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            word_start = true;
            continue;
        }
        if (c >= 0x80 || !std::isalnum(c)) {
            continue;
        }
        out.push_back(word_start ? static_cast<char>(std::toupper(c)) : static_cast<char>(c));
        word_start = false;
    }
    if (out.empty()) {
        return std::nullopt;
    }
    if (std::isdigit(static_cast<unsigned char>(out.front()))) {
        out.insert(out.begin(), 'N');
    }
    return out;
}

/// Meaningful workbook name for a label: operator word and range asterisk
/// stripped, punctuation dropped, words PascalCased; inputs and ranges get
/// an "In" suffix. Throws EMPTY_AFTER_STRIP.
inline std::string derive_name(const std::string& label, NameRole role) {
    auto base = try_derive_base_name(label);
    if (!base) {
        throw Error("EMPTY_AFTER_STRIP", "label '" + label + "' yields an empty name");
    }
    std::string name = *base;
    if (role != NameRole::Function) {
        name += "In";
    }
    if (detail::looks_like_address(name) || detail::is_reserved_word(name)) {
        name += "_";
    }
    return name;
}

/// Hands out case-insensitively unique names, suffixing 2, 3, ... on
/// collision ("_2" when the plain suffix would read as a cell address).
class NameAllocator {
public:
    std::string claim(const std::string& base) {
        if (is_free(base)) {
            taken_.insert(detail::upper(base));
            return base;
        }
        for (int n = 2;; ++n) {
            std::string candidate = base + std::to_string(n);
            if (detail::looks_like_address(candidate)) {
                candidate = base + "_" + std::to_string(n);
            }
            if (is_free(candidate)) {
                taken_.insert(detail::upper(candidate));
                return candidate;
            }
        }
    }

private:
    bool is_free(const std::string& name) const {
        return !taken_.count(detail::upper(name)) && !detail::looks_like_address(name) &&
               !detail::is_reserved_word(name);
    }

    std::set<std::string> taken_;
};

} // namespace ssc
