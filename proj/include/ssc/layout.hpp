#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ssc/address.hpp"
#include "ssc/model.hpp"
#include "ssc/naming.hpp"
#include "ssc/structurer.hpp"

namespace ssc {

inline constexpr const char* kInputSheet = "Input";
inline constexpr const char* kWorkingsSheet = "Workings";
inline constexpr const char* kOutputSheet = "Output";

struct LayoutConfig {
    int unit_header_row = 5;
    int workings_first_row = 6;
    int input_first_row = 5;
    int base_column = 2; // virtual column for depth 0 (B)
    int max_virtual_columns = 24;
    int indent_width = 2;
    int module_gap = 1;
    int output_block_gap = 2;
    std::string unit = "£";
};

struct LabelPlan {
    std::string text;
    friend bool operator==(const LabelPlan&, const LabelPlan&) = default;
};
struct FormulaSlot {
    std::string node_id;
    friend bool operator==(const FormulaSlot&, const FormulaSlot&) = default;
};
struct ValueSlot {
    std::string input_id;
    std::optional<std::size_t> member;
    friend bool operator==(const ValueSlot&, const ValueSlot&) = default;
};
struct UnitHeader {
    std::string text;
    friend bool operator==(const UnitHeader&, const UnitHeader&) = default;
};

using CellPlan = std::variant<LabelPlan, FormulaSlot, ValueSlot, UnitHeader>;

/// One laid-out structure node on the Workings sheet.
struct SlotInfo {
    std::string node_id;
    std::string label;      // as written on the sheet, indentation and " *" included
    std::string node_label; // the element's own label
    NodeKind kind = NodeKind::Function;
    int depth = 0;
    GridPos pos;
    std::size_t module = 0;
    std::optional<std::size_t> parent;
    std::vector<std::size_t> children;   // laid-out children, tree order
    std::vector<std::string> ranges;     // input ranges aggregated (iteration children)
    std::string target_module;           // ModuleRef only
};

struct SheetLayout {
    std::string name;
    std::map<GridPos, CellPlan> cells;

    // Workings metadata
    std::vector<SlotInfo> slots;
    std::vector<std::size_t> module_roots;

    // Input metadata
    std::map<std::string, GridPos> input_cells;
    std::map<std::string, std::pair<GridPos, GridPos>> range_extents;

    void place(GridPos at, CellPlan plan) {
        if (!cells.emplace(at, std::move(plan)).second) {
            throw Error("LAYOUT_OVERLAP", name + "!" + a1(at) + " assigned twice");
        }
    }

    int last_row() const { return cells.empty() ? 0 : cells.rbegin()->first.row; }
};

/// Maps each module onto rows: pre-order, one node per row, label in column
/// A indented by depth, slot in column base+depth. Range iterations take no
/// row; their parent's label gets " *". Throws DEPTH_OVERFLOW.
inline SheetLayout layout_workings(const StructureForest& forest, const LayoutConfig& config = {}) {
    SheetLayout layout;
    layout.name = kWorkingsSheet;
    int header_row = config.unit_header_row;
    int row = config.workings_first_row;

    for (std::size_t m = 0; m < forest.modules.size(); ++m) {
        if (m > 0) {
            header_row = row + config.module_gap; // row is one past the previous module
            row = header_row + 1;
        }
        std::set<int> columns;

        auto visit = [&](auto&& self, const StructureNode& node,
                         std::optional<std::size_t> parent) -> void {
            if (node.kind == NodeKind::Iteration) {
                if (parent) {
                    layout.slots[*parent].ranges.push_back(node.id);
                }
                return;
            }
            if (node.depth + 1 > config.max_virtual_columns) {
                throw Error("DEPTH_OVERFLOW", "node '" + node.id + "' at depth " +
                                                  std::to_string(node.depth) + " exceeds " +
                                                  std::to_string(config.max_virtual_columns) +
                                                  " virtual columns");
            }
            std::size_t index = layout.slots.size();
            SlotInfo slot;
            slot.node_id = node.id;
            slot.kind = node.kind;
            slot.depth = node.depth;
            slot.pos = {row++, config.base_column + node.depth};
            slot.module = m;
            slot.parent = parent;
            slot.target_module = node.module;
            slot.node_label = node.label;
            layout.slots.push_back(slot);
            if (parent) {
                layout.slots[*parent].children.push_back(index);
            }
            columns.insert(slot.pos.col);
            for (const auto& c : node.children) {
                self(self, c, index);
            }
            // Children are known now, so the asterisk can be decided.
            std::string label = node.label;
            bool starred = label.size() >= 2 && label.compare(label.size() - 2, 2, " *") == 0;
            if (!layout.slots[index].ranges.empty() && !starred) {
                label += " *";
            }
            layout.slots[index].label =
                std::string(static_cast<std::size_t>(node.depth * config.indent_width), ' ') + label;
        };
        layout.module_roots.push_back(layout.slots.size());
        visit(visit, forest.modules[m].root, std::nullopt);

        for (int col : columns) {
            layout.place({header_row, col}, UnitHeader{config.unit});
        }
    }
    for (const auto& s : layout.slots) {
        layout.place({s.pos.row, 1}, LabelPlan{s.label});
        layout.place(s.pos, FormulaSlot{s.node_id});
    }
    return layout;
}

/// Input sheet: declaration order, scalar values in column B, range members
/// in column C beneath a group label row.
inline SheetLayout layout_input(const ModelSpec& spec, const LayoutConfig& config = {}) {
    SheetLayout layout;
    layout.name = kInputSheet;
    int row = config.input_first_row;
    for (const auto& entry : spec.input_order) {
        if (entry.kind == InputKind::Scalar) {
            const auto& item = spec.inputs[entry.index];
            layout.place({row, 1}, LabelPlan{strip_operator_word(item.label)});
            layout.place({row, 2}, ValueSlot{item.id, std::nullopt});
            layout.input_cells[item.id] = {row, 2};
            ++row;
            continue;
        }
        const auto& range = spec.ranges[entry.index];
        layout.place({row, 1}, LabelPlan{strip_operator_word(range.label)});
        ++row;
        int first = row;
        for (std::size_t i = 0; i < range.members.size(); ++i) {
            layout.place({row, 1}, LabelPlan{range.members[i].label});
            layout.place({row, 3}, ValueSlot{range.id, i});
            ++row;
        }
        if (row > first) {
            layout.range_extents[range.id] = {GridPos{first, 3}, GridPos{row - 1, 3}};
        }
    }
    return layout;
}

/// Output sheet: per block a title row, a blank row, then one row per item
/// (label in B, reference in C); blocks separated by blank rows.
inline SheetLayout layout_output(const ModelSpec& spec, const LayoutConfig& config = {}) {
    SheetLayout layout;
    layout.name = kOutputSheet;
    int row = 1;
    for (const auto& block : spec.outputs) {
        layout.place({row, 2}, LabelPlan{block.title});
        row += 2;
        for (const auto& r : block.rows) {
            layout.place({row, 2}, LabelPlan{r.label});
            layout.place({row, 3}, FormulaSlot{r.ref});
            ++row;
        }
        row += config.output_block_gap;
    }
    return layout;
}

/// Extent of a laid-out range on the Input sheet. Throws UNKNOWN_RANGE.
inline std::pair<CellAddress, CellAddress> range_extent(const SheetLayout& layout,
                                                        const std::string& range_id) {
    auto it = layout.range_extents.find(range_id);
    if (it == layout.range_extents.end()) {
        throw Error("UNKNOWN_RANGE", "range '" + range_id + "' is not laid out");
    }
    return {CellAddress{layout.name, it->second.first.row, it->second.first.col},
            CellAddress{layout.name, it->second.second.row, it->second.second.col}};
}

struct WorkbookLayout {
    SheetLayout input;
    SheetLayout workings;
    SheetLayout output;
};

inline WorkbookLayout layout_workbook(const ModelSpec& spec, const StructureForest& forest,
                                      const LayoutConfig& config = {}) {
    return {layout_input(spec, config), layout_workings(forest, config), layout_output(spec, config)};
}

} // namespace ssc
