#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "ssc/grid.hpp"
#include "ssc/grid_refs.hpp"
#include "ssc/layout.hpp"

namespace ssc {

struct Violation {
    std::string code;
    CellAddress address;
    std::string message;
    bool qualitative = false;

    friend bool operator==(const Violation&, const Violation&) = default;
};

inline const std::vector<std::string>& violation_codes() {
    static const std::vector<std::string> codes = {
        "ONE_FUNC_PER_ROW", "COLUMN_DEPTH_MISMATCH", "INPUT_HAS_FORMULA", "OUTPUT_BAD_REF",
        "WORKINGS_BAD_REF", "MISSING_ASTERISK",      "SPURIOUS_ASTERISK", "UNNAMED_RANGE"};
    return codes;
}

namespace detail {

inline bool has_asterisk(const std::string& label) {
    return label.size() >= 2 && label.compare(label.size() - 2, 2, " *") == 0;
}

class Auditor {
public:
    explicit Auditor(const WorkbookGrid& wb) : wb_(wb) {
        input_ = require(kInputSheet);
        workings_ = require(kWorkingsSheet);
        output_ = require(kOutputSheet);
    }

    std::vector<Violation> run() {
        audit_input();
        audit_workings();
        audit_output();
        std::stable_sort(out_.begin(), out_.end(), [](const Violation& a, const Violation& b) {
            return a.address < b.address;
        });
        return std::move(out_);
    }

private:
    const Sheet* require(const char* name) const {
        const Sheet* s = wb_.find_sheet(name);
        if (!s) {
            throw Error("MALFORMED_GRID", std::string("workbook has no ") + name + " sheet");
        }
        return s;
    }

    ExprPtr parse(const Sheet& sheet, GridPos pos, const Cell& cell) const {
        try {
            return parse_cell_formula(wb_, cell.text);
        } catch (const ParseError& e) {
            throw Error("MALFORMED_GRID",
                        sheet.name + "!" + a1(pos) + ": unparseable formula: " + e.what());
        }
    }

    void flag(std::string code, const std::string& sheet, GridPos pos, std::string message) {
        bool qualitative = code == "MISSING_ASTERISK" || code == "SPURIOUS_ASTERISK" ||
                           code == "UNNAMED_RANGE";
        out_.push_back({std::move(code), CellAddress{sheet, pos.row, pos.col}, std::move(message),
                        qualitative});
    }

    void audit_input() {
        for (const auto& [pos, cell] : input_->cells) {
            if (cell.kind == CellKind::Formula) {
                flag("INPUT_HAS_FORMULA", input_->name, pos,
                     "input cell holds formula " + cell.text);
            }
        }
    }

    void audit_output() {
        for (const auto& [pos, cell] : output_->cells) {
            if (cell.kind != CellKind::Formula) {
                continue;
            }
            for (const auto& use : refs_in_order(*parse(*output_, pos, cell))) {
                auto r = resolve_grid_ref(wb_, output_->name, use.target);
                if (!r || r->sheet != kWorkingsSheet) {
                    flag("OUTPUT_BAD_REF", output_->name, pos,
                         "'" + use.target + "' is not a Workings cell or name");
                }
            }
        }
    }

    struct Row {
        const Cell* label = nullptr;
        std::vector<std::pair<GridPos, const Cell*>> formulas;
        bool header = false;
    };

    static int label_depth(const std::string& label, bool& exact) {
        std::size_t spaces = label.find_first_not_of(' ');
        if (spaces == std::string::npos) {
            spaces = label.size();
        }
        exact = spaces % 2 == 0;
        return static_cast<int>(spaces / 2);
    }

    void audit_workings() {
        std::map<int, Row> rows;
        for (const auto& [pos, cell] : workings_->cells) {
            Row& row = rows[pos.row];
            if (pos.col == 1 && cell.kind == CellKind::Label) {
                row.label = &cell;
            } else if (cell.kind == CellKind::Formula) {
                row.formulas.emplace_back(pos, &cell);
            }
        }
        // Rows with no label in column A and no formula separate module blocks.
        std::map<int, int> block_of;
        int block = 0;
        for (auto& [r, row] : rows) {
            row.header = !row.label && row.formulas.empty();
            if (row.header) {
                ++block;
            }
            block_of[r] = block;
        }

        for (const auto& [r, row] : rows) {
            if (row.formulas.size() > 1) {
                for (std::size_t i = 1; i < row.formulas.size(); ++i) {
                    flag("ONE_FUNC_PER_ROW", workings_->name, row.formulas[i].first,
                         "row " + std::to_string(r) + " holds " +
                             std::to_string(row.formulas.size()) + " formulas");
                }
            }
            bool aggregates_input_range = false;
            for (const auto& [pos, cell] : row.formulas) {
                check_depth(row, pos);
                aggregates_input_range |= check_refs(pos, *cell, rows, block_of);
            }
            if (row.label) {
                bool starred = has_asterisk(row.label->text);
                GridPos at{r, 1};
                if (aggregates_input_range && !starred) {
                    flag("MISSING_ASTERISK", workings_->name, at,
                         "label '" + row.label->text + "' aggregates an input range but lacks ' *'");
                } else if (!aggregates_input_range && starred) {
                    flag("SPURIOUS_ASTERISK", workings_->name, at,
                         "label '" + row.label->text + "' carries ' *' but aggregates no input range");
                }
            }
        }
    }

    void check_depth(const Row& row, GridPos pos) {
        if (!row.label) {
            flag("COLUMN_DEPTH_MISMATCH", workings_->name, pos,
                 "formula at " + a1(pos) + " has no label in column A");
            return;
        }
        bool exact = true;
        int depth = label_depth(row.label->text, exact);
        if (!exact || pos.col != 2 + depth) {
            flag("COLUMN_DEPTH_MISMATCH", workings_->name, pos,
                 "formula in column " + column_name(pos.col) + " but label indent implies column " +
                     column_name(2 + depth));
        }
    }

    int depth_of_row(const std::map<int, Row>& rows, int r) const {
        auto it = rows.find(r);
        if (it == rows.end() || !it->second.label) {
            return -1;
        }
        bool exact = true;
        return label_depth(it->second.label->text, exact);
    }

    // Returns whether the formula aggregates a range on the Input sheet.
    bool check_refs(GridPos pos, const Cell& cell, const std::map<int, Row>& rows,
                    const std::map<int, int>& block_of) {
        ExprPtr expr = parse(*workings_, pos, cell);
        bool bare = std::holds_alternative<Ref>(expr->node);
        bool aggregates = false;
        for (const auto& use : refs_in_order(*expr)) {
            auto r = resolve_grid_ref(wb_, workings_->name, use.target);
            if (!r) {
                flag("WORKINGS_BAD_REF", workings_->name, pos,
                     "'" + use.target + "' does not resolve");
                continue;
            }
            bool extent = r->is_range || r->first != r->last;
            if (r->sheet == kInputSheet) {
                if (extent) {
                    aggregates = true;
                    if (r->name.empty()) {
                        flag("UNNAMED_RANGE", workings_->name, pos,
                             "input range '" + use.target + "' is referenced by address, not by name");
                    }
                }
                continue;
            }
            if (r->sheet != kWorkingsSheet) {
                flag("WORKINGS_BAD_REF", workings_->name, pos,
                     "'" + use.target + "' points outside the Input and Workings sheets");
                continue;
            }
            if (r->first.col > pos.col) {
                continue;
            }
            bool module_ref = bare && !extent && depth_of_row(rows, r->first.row) == 0 &&
                              r->first.col == 2 && block_of.count(r->first.row) &&
                              block_of.at(r->first.row) != block_of.at(pos.row);
            if (!module_ref) {
                flag("WORKINGS_BAD_REF", workings_->name, pos,
                     "'" + use.target + "' is not in a column to the right of " + a1(pos));
            }
        }
        return aggregates;
    }

    const WorkbookGrid& wb_;
    const Sheet* input_ = nullptr;
    const Sheet* workings_ = nullptr;
    const Sheet* output_ = nullptr;
    std::vector<Violation> out_;
};

} // namespace detail

/// Lints a workbook against the structural rules. Throws MALFORMED_GRID.
inline std::vector<Violation> audit(const WorkbookGrid& wb) { return detail::Auditor(wb).run(); }

/// Fixed explanatory paragraph for a violation code. Throws UNKNOWN_CODE.
inline std::string explain_code(const std::string& code) {
    static const std::map<std::string, std::string> text = {
        {"ONE_FUNC_PER_ROW",
         "Each row of the Workings sheet may contain exactly one function. Placing several "
         "formulas on one row hides the structure of the calculation and makes a missing or "
         "duplicated step hard to spot."},
        {"COLUMN_DEPTH_MISMATCH",
         "A function must sit in the virtual column that matches its depth in the structure, "
         "column B for depth 0 and one column further right per level. The indentation of the "
         "row label gives the depth."},
        {"INPUT_HAS_FORMULA",
         "The Input sheet holds raw data only. Calculations belong on the Workings sheet so that "
         "every value a user may change is isolated from the logic that consumes it."},
        {"OUTPUT_BAD_REF",
         "Output cells present results and may only refer to Workings cells or names. Reaching "
         "into the Input sheet or computing on the Output sheet bypasses the Workings structure."},
        {"WORKINGS_BAD_REF",
         "A Workings function may only refer to input cells or names, named input ranges, or "
         "Workings cells in columns to its right, which hold its precedents. A module root may "
         "also be referenced from another module."},
        {"MISSING_ASTERISK",
         "A function that aggregates an input range must have a label ending in an asterisk, "
         "telling the reader that its precedents live on the Input sheet rather than below it."},
        {"SPURIOUS_ASTERISK",
         "Only functions that aggregate an input range carry an asterisk. A stray asterisk sends "
         "the reader to the Input sheet looking for precedents that do not exist."},
        {"UNNAMED_RANGE",
         "Input ranges are referenced as a whole through a name. An address span such as "
         "Input!C11:C18 silently goes stale when members are added or removed."},
    };
    auto it = text.find(code);
    if (it == text.end()) {
        throw Error("UNKNOWN_CODE", "no violation code '" + code + "'");
    }
    return it->second;
}

inline std::string explain_violation(const Violation& v) { return explain_code(v.code); }

} // namespace ssc
