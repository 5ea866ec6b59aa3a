#pragma once

#include <optional>
#include <string>

#include "ssc/grid.hpp"
#include "ssc/parser.hpp"

namespace ssc {

/// A formula reference resolved against a workbook.
struct ResolvedRef {
    std::string sheet;
    GridPos first;
    GridPos last;
    bool is_range = false; // written or named as an extent
    std::string name;      // non-empty when resolved through the name table
};

/// Resolves "B5", "Input!B5", "F11:F13", "Input!C11:C18" or a workbook name,
/// relative to `current_sheet`. nullopt when unresolvable.
inline std::optional<ResolvedRef> resolve_grid_ref(const WorkbookGrid& wb,
                                                   const std::string& current_sheet,
                                                   const std::string& target) {
    std::string sheet = current_sheet;
    std::string rest = target;
    auto bang = target.find('!');
    if (bang != std::string::npos) {
        sheet = target.substr(0, bang);
        rest = target.substr(bang + 1);
    }
    auto colon = rest.find(':');
    if (colon != std::string::npos) {
        auto first = parse_a1(rest.substr(0, colon));
        auto last = parse_a1(rest.substr(colon + 1));
        if (!first || !last || !wb.find_sheet(sheet) || last->row < first->row ||
            last->col < first->col) {
            return std::nullopt;
        }
        return ResolvedRef{sheet, *first, *last, true, {}};
    }
    if (auto cell = parse_a1(rest)) {
        if (!wb.find_sheet(sheet)) {
            return std::nullopt;
        }
        return ResolvedRef{sheet, *cell, *cell, false, {}};
    }
    if (bang != std::string::npos) {
        return std::nullopt;
    }
    auto it = wb.names.find(target);
    if (it == wb.names.end() || !wb.find_sheet(it->second.sheet)) {
        return std::nullopt;
    }
    return ResolvedRef{it->second.sheet, it->second.first, it->second.last, it->second.is_range,
                       target};
}

/// Formula parse options for grid cells: addresses allowed, SUM arguments
/// classified as ranges when written as extents or naming an extent.
inline ExprParseOptions grid_parse_options(const WorkbookGrid& wb) {
    ExprParseOptions options;
    options.allow_cell_refs = true;
    options.is_range = [&wb](const std::string& target) {
        auto it = wb.names.find(target);
        return it != wb.names.end() && it->second.is_range;
    };
    return options;
}

/// Parses a formula cell's text ("=..."). Throws ParseError.
inline ExprPtr parse_cell_formula(const WorkbookGrid& wb, const std::string& text) {
    if (text.empty() || text.front() != '=') {
        throw ParseError("formula must start with '='", {1, 1, 1});
    }
    return detail::ExprParser(std::string_view(text).substr(1), grid_parse_options(wb), 1, 2)
        .parse_all();
}

} // namespace ssc
