#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace ssc {

/// Row/column position inside one sheet, both 1-based (column A = 1).
struct GridPos {
    int row = 1;
    int col = 1;

    friend auto operator<=>(const GridPos&, const GridPos&) = default;
};

inline std::string column_name(int col) {
    std::string s;
    while (col > 0) {
        int rem = (col - 1) % 26;
        s.insert(s.begin(), static_cast<char>('A' + rem));
        col = (col - 1) / 26;
    }
    return s;
}

inline std::string a1(GridPos p) { return column_name(p.col) + std::to_string(p.row); }

/// Parses "B5"-style addresses: 1-3 uppercase letters then a row without a
/// leading zero.
inline std::optional<GridPos> parse_a1(std::string_view s) {
    std::size_t i = 0;
    int col = 0;
    while (i < s.size() && s[i] >= 'A' && s[i] <= 'Z') {
        col = col * 26 + (s[i] - 'A' + 1);
        ++i;
    }
    if (i == 0 || i > 3 || i == s.size() || s[i] == '0') {
        return std::nullopt;
    }
    int row = 0;
    for (std::size_t j = i; j < s.size(); ++j) {
        if (s[j] < '0' || s[j] > '9' || row > 10'000'000) {
            return std::nullopt;
        }
        row = row * 10 + (s[j] - '0');
    }
    return GridPos{row, col};
}

inline bool is_cell_address(std::string_view s) { return parse_a1(s).has_value(); }

/// Cell address with its sheet, rendered "Input!B5".
struct CellAddress {
    std::string sheet;
    int row = 1;
    int col = 1;

    GridPos pos() const { return {row, col}; }
    std::string local() const { return a1(pos()); }
    std::string qualified() const { return sheet + "!" + local(); }

    friend auto operator<=>(const CellAddress&, const CellAddress&) = default;
};

} // namespace ssc
