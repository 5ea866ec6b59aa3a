#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ssc/grid.hpp"
#include "ssc/grid_refs.hpp"

namespace testing_support {

struct Mutant {
    std::string rule;     // audit rule the mutation targets, "1".."6"
    std::string name;
    ssc::WorkbookGrid grid;
    std::string sheet;    // where the violation must be reported
    int row = 0;
};

namespace detail {

inline bool starred(const std::string& label) {
    return label.size() >= 2 && label.compare(label.size() - 2, 2, " *") == 0;
}

struct FormulaRow {
    int row;
    ssc::GridPos pos;
    std::string text;
};

inline std::vector<FormulaRow> workings_formulas(const ssc::WorkbookGrid& wb) {
    std::vector<FormulaRow> out;
    for (const auto& [pos, cell] : wb.find_sheet("Workings")->cells) {
        if (cell.kind == ssc::CellKind::Formula) out.push_back({pos.row, pos, cell.text});
    }
    return out;
}

} // namespace detail

// The fixed mutation set, one entry per applicable mutation. Rules 1 to 5
// always apply to a workbook with at least two Workings formulas and one
// Output formula; the asterisk and unnamed-range mutations need a range.
inline std::vector<Mutant> mutate(const ssc::WorkbookGrid& clean) {
    std::vector<Mutant> out;
    auto rows = detail::workings_formulas(clean);
    const ssc::Sheet& workings = *clean.find_sheet("Workings");

    // 1: a second formula lands on an occupied row.
    if (rows.size() >= 2) {
        Mutant m{"1", "second formula on a row", clean, "Workings", rows.front().row};
        auto& cells = m.grid.find_sheet("Workings")->cells;
        const auto& moved = rows.back();
        ssc::Cell cell = cells.at(moved.pos);
        cells.erase(moved.pos);
        int col = moved.pos.col;
        while (cells.count({rows.front().row, col})) ++col;
        cells[{rows.front().row, col}] = cell;
        out.push_back(std::move(m));
    }

    // 2: a label indented one level deeper than its formula column.
    if (!rows.empty()) {
        const auto& target = rows.back();
        Mutant m{"2", "label indent changed", clean, "Workings", target.row};
        auto& label = m.grid.find_sheet("Workings")->cells.at({target.row, 1});
        label.text = "  " + label.text;
        out.push_back(std::move(m));
    }

    // 3: a formula planted over an input value.
    for (const auto& [pos, cell] : clean.find_sheet("Input")->cells) {
        if (cell.kind == ssc::CellKind::Number) {
            Mutant m{"3", "formula on the Input sheet", clean, "Input", pos.row};
            m.grid.find_sheet("Input")->cells[pos] = ssc::Cell::formula("=1+1");
            out.push_back(std::move(m));
            break;
        }
    }

    // 4: an output reaching straight into the Input sheet.
    for (const auto& [pos, cell] : clean.find_sheet("Output")->cells) {
        if (cell.kind == ssc::CellKind::Formula) {
            std::string input_cell;
            for (const auto& [ipos, icell] : clean.find_sheet("Input")->cells) {
                if (icell.kind == ssc::CellKind::Number) {
                    input_cell = "Input!" + ssc::a1(ipos);
                    break;
                }
            }
            Mutant m{"4", "output references input", clean, "Output", pos.row};
            m.grid.find_sheet("Output")->cells[pos] = ssc::Cell::formula("=" + input_cell);
            out.push_back(std::move(m));
            break;
        }
    }

    // 5: a formula referring to a cell in its own column.
    if (!rows.empty()) {
        const auto& target = rows.front();
        Mutant m{"5", "reference to own column", clean, "Workings", target.row};
        auto& cell = m.grid.find_sheet("Workings")->cells.at(target.pos);
        cell.text = "=" + ssc::a1(target.pos) + "+1";
        out.push_back(std::move(m));
    }

    // 6: asterisk added where no range is aggregated, removed where one is.
    for (const auto& r : rows) {
        const ssc::Cell* label = workings.at({r.row, 1});
        if (!label || detail::starred(label->text)) continue;
        Mutant m{"6", "spurious asterisk", clean, "Workings", r.row};
        m.grid.find_sheet("Workings")->cells.at({r.row, 1}).text += " *";
        out.push_back(std::move(m));
        break;
    }
    for (const auto& r : rows) {
        const ssc::Cell* label = workings.at({r.row, 1});
        if (!label || !detail::starred(label->text)) continue;
        Mutant m{"6", "missing asterisk", clean, "Workings", r.row};
        auto& text = m.grid.find_sheet("Workings")->cells.at({r.row, 1}).text;
        text.resize(text.size() - 2);
        out.push_back(std::move(m));

        // The same row with its named range replaced by the raw extent.
        ssc::ExprPtr expr = ssc::parse_cell_formula(clean, r.text);
        bool replaced = false;
        auto raw = ssc::rename_refs(expr, [&](const std::string& target, bool is_range) {
            auto it = clean.names.find(target);
            if (is_range && it != clean.names.end() && it->second.is_range && !replaced) {
                replaced = true;
                return it->second.to_string();
            }
            return target;
        });
        if (replaced) {
            Mutant u{"6", "range referenced by address", clean, "Workings", r.row};
            u.grid.find_sheet("Workings")->cells.at(r.pos).text = "=" + ssc::pretty_expr(raw);
            out.push_back(std::move(u));
        }
        break;
    }
    return out;
}

} // namespace testing_support
