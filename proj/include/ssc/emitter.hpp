#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssc/grid.hpp"
#include "ssc/layout.hpp"
#include "ssc/model.hpp"
#include "ssc/naming.hpp"
#include "ssc/structurer.hpp"

namespace ssc {

struct EmitOptions {
    int scale = 2;
};

/// ValueMap / grid key of a range member.
inline std::string member_key(const std::string& range_id, std::size_t index) {
    return range_id + "[" + std::to_string(index) + "]";
}

namespace detail {

[[noreturn]] inline void inconsistent(const std::string& what) {
    throw Error("INCONSISTENT_LAYOUT", what);
}

class Emitter {
public:
    Emitter(const ModelSpec& spec, const StructureForest& forest, const WorkbookLayout& layout,
            RefMode mode, const EmitOptions& options)
        : spec_(spec), forest_(forest), layout_(layout), mode_(mode), options_(options) {}

    WorkbookGrid run() {
        wb_.model = spec_.title;
        wb_.ref_mode = mode_;
        assign_names();
        wb_.sheets.push_back(emit_input());
        wb_.sheets.push_back(emit_workings());
        wb_.sheets.push_back(emit_output());
        return std::move(wb_);
    }

private:
    void assign_names() {
        NameAllocator names;
        for (const auto& entry : spec_.input_order) {
            if (entry.kind == InputKind::Scalar) {
                const auto& item = spec_.inputs[entry.index];
                if (mode_ == RefMode::Address) {
                    continue;
                }
                std::string name = names.claim(derive_name(item.label, NameRole::Input));
                input_names_[item.id] = name;
                auto at = layout_.input.input_cells.at(item.id);
                wb_.names[name] = NameTarget{kInputSheet, at, at, false};
                continue;
            }
            const auto& range = spec_.ranges[entry.index];
            auto extent = layout_.input.range_extents.find(range.id);
            if (extent == layout_.input.range_extents.end()) {
                inconsistent("range '" + range.id + "' has no extent");
            }
            // Address mode keeps range names but writes them bare.
            std::string base = derive_name(
                range.label, mode_ == RefMode::Name ? NameRole::Range : NameRole::Function);
            std::string name = names.claim(base);
            range_names_[range.id] = name;
            wb_.names[name] = NameTarget{kInputSheet, extent->second.first, extent->second.second, true};
        }
        if (mode_ == RefMode::Name) {
            // Computing cells claim names before the cells that only copy a value.
            const auto& slots = layout_.workings.slots;
            slot_names_.resize(slots.size());
            for (bool computing : {true, false}) {
                for (std::size_t i = 0; i < slots.size(); ++i) {
                    bool is_computing = slots[i].kind == NodeKind::Function ||
                                        slots[i].kind == NodeKind::Selection;
                    if (is_computing != computing) {
                        continue;
                    }
                    std::string name =
                        names.claim(derive_name(slots[i].node_label, NameRole::Function));
                    slot_names_[i] = name;
                    wb_.names[name] = NameTarget{kWorkingsSheet, slots[i].pos, slots[i].pos, false};
                }
            }
        }
    }

    Sheet emit_input() {
        Sheet sheet{kInputSheet, {}};
        for (const auto& [pos, plan] : layout_.input.cells) {
            if (const auto* label = std::get_if<LabelPlan>(&plan)) {
                sheet.cells[pos] = Cell::label(label->text);
            } else if (const auto* value = std::get_if<ValueSlot>(&plan)) {
                if (value->member) {
                    const auto* range = spec_.find_range(value->input_id);
                    if (!range || *value->member >= range->members.size()) {
                        inconsistent("bad range slot " + a1(pos));
                    }
                    sheet.cells[pos] =
                        Cell::number(range->members[*value->member].value.rescaled(options_.scale),
                                     member_key(value->input_id, *value->member));
                } else {
                    const auto* item = spec_.find_input(value->input_id);
                    if (!item) {
                        inconsistent("bad input slot " + a1(pos));
                    }
                    sheet.cells[pos] = Cell::number(item->value.rescaled(options_.scale), item->id);
                }
            } else {
                inconsistent("unexpected plan on Input sheet at " + a1(pos));
            }
        }
        return sheet;
    }

    std::string input_ref(const std::string& input_id) const {
        if (mode_ == RefMode::Name) {
            return input_names_.at(input_id);
        }
        auto it = layout_.input.input_cells.find(input_id);
        if (it == layout_.input.input_cells.end()) {
            inconsistent("input '" + input_id + "' has no Input cell");
        }
        return std::string(kInputSheet) + "!" + a1(it->second);
    }

    std::string slot_ref(std::size_t index) const {
        return mode_ == RefMode::Name ? slot_names_[index] : a1(layout_.workings.slots[index].pos);
    }

    std::size_t child_slot(const SlotInfo& slot, const std::string& id) const {
        for (std::size_t c : slot.children) {
            if (layout_.workings.slots[c].node_id == id) {
                return c;
            }
        }
        inconsistent("node '" + slot.node_id + "' has no laid-out child '" + id + "'");
    }

    std::string range_ref(const std::string& range_id) const {
        auto it = range_names_.find(range_id);
        if (it == range_names_.end()) {
            inconsistent("range '" + range_id + "' has no name");
        }
        return it->second;
    }

    ExprPtr render(const ExprPtr& e, const SlotInfo& slot) const {
        auto rename = [&](const std::string& target, bool is_range) {
            return is_range ? range_ref(target) : slot_ref(child_slot(slot, target));
        };
        return std::visit(
            [&](const auto& n) -> ExprPtr {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Binary>) {
                    return make_binary(n.op, render(n.lhs, slot), render(n.rhs, slot));
                } else if constexpr (std::is_same_v<T, Select>) {
                    std::vector<SelectOption> options;
                    for (const auto& o : n.options) {
                        options.push_back({Guard{o.guard.op, render(o.guard.lhs, slot),
                                                 render(o.guard.rhs, slot)},
                                           render(o.value, slot)});
                    }
                    return make_select(std::move(options));
                } else if constexpr (std::is_same_v<T, Aggregate>) {
                    if (mode_ == RefMode::Address) {
                        if (auto collapsed = collapse_siblings(n, slot)) {
                            return make_sum({RangeRef{*collapsed}});
                        }
                    }
                    return rename_refs(e, rename);
                } else {
                    return rename_refs(e, rename);
                }
            },
            e->node);
    }

    // SUM over >= 2 sibling slots on consecutive rows of one column becomes a
    // cell extent ("F11:F13").
    std::optional<std::string> collapse_siblings(const Aggregate& agg, const SlotInfo& slot) const {
        if (agg.args.size() < 2) {
            return std::nullopt;
        }
        std::vector<GridPos> cells;
        for (const auto& a : agg.args) {
            if (arg_is_range(a)) {
                return std::nullopt;
            }
            cells.push_back(layout_.workings.slots[child_slot(slot, arg_target(a))].pos);
        }
        for (std::size_t i = 1; i < cells.size(); ++i) {
            if (cells[i].col != cells[0].col || cells[i].row != cells[i - 1].row + 1) {
                return std::nullopt;
            }
        }
        return a1(cells.front()) + ":" + a1(cells.back());
    }

    std::size_t module_root_slot(const std::string& module) const {
        for (std::size_t m = 0; m < forest_.modules.size(); ++m) {
            if (forest_.modules[m].name == module) {
                return layout_.workings.module_roots.at(m);
            }
        }
        inconsistent("unknown module '" + module + "'");
    }

    Sheet emit_workings() {
        Sheet sheet{kWorkingsSheet, {}};
        for (const auto& [pos, plan] : layout_.workings.cells) {
            if (const auto* label = std::get_if<LabelPlan>(&plan)) {
                sheet.cells[pos] = Cell::label(label->text);
            } else if (const auto* unit = std::get_if<UnitHeader>(&plan)) {
                sheet.cells[pos] = Cell::label(unit->text);
            }
        }
        for (std::size_t i = 0; i < layout_.workings.slots.size(); ++i) {
            const SlotInfo& slot = layout_.workings.slots[i];
            switch (slot.kind) {
            case NodeKind::Leaf:
            case NodeKind::Constant:
                sheet.cells[slot.pos] = Cell::formula("=" + input_ref(slot.node_id));
                break;
            case NodeKind::ModuleRef:
                sheet.cells[slot.pos] = Cell::formula("=" + slot_ref(module_root_slot(slot.target_module)));
                break;
            case NodeKind::Function:
            case NodeKind::Selection: {
                const auto* f = spec_.find_function(slot.node_id);
                if (!f || !f->body) {
                    inconsistent("no formula for '" + slot.node_id + "'");
                }
                sheet.cells[slot.pos] =
                    Cell::formula("=" + pretty_expr(*render(f->body, slot)), slot.node_id);
                break;
            }
            default:
                inconsistent(std::string("cannot emit ") + to_string(slot.kind) + " node '" +
                             slot.node_id + "'");
            }
        }
        return sheet;
    }

    // First Workings slot showing `ref`: its Function row, or for an input
    // its first leaf row.
    std::size_t output_target(const std::string& ref) const {
        const auto& slots = layout_.workings.slots;
        bool is_input = spec_.find_input(ref) != nullptr;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            if (slots[i].node_id != ref) {
                continue;
            }
            bool leaf = slots[i].kind == NodeKind::Leaf || slots[i].kind == NodeKind::Constant;
            bool func = slots[i].kind == NodeKind::Function || slots[i].kind == NodeKind::Selection;
            if ((is_input && leaf) || (!is_input && func)) {
                return i;
            }
        }
        inconsistent("output reference '" + ref + "' has no Workings slot");
    }

    Sheet emit_output() {
        Sheet sheet{kOutputSheet, {}};
        for (const auto& [pos, plan] : layout_.output.cells) {
            if (const auto* label = std::get_if<LabelPlan>(&plan)) {
                sheet.cells[pos] = Cell::label(label->text);
            } else if (const auto* slot = std::get_if<FormulaSlot>(&plan)) {
                std::size_t target = output_target(slot->node_id);
                std::string text = mode_ == RefMode::Name
                                       ? slot_names_[target]
                                       : std::string(kWorkingsSheet) + "!" +
                                             a1(layout_.workings.slots[target].pos);
                sheet.cells[pos] = Cell::formula("=" + text);
            } else {
                inconsistent("unexpected plan on Output sheet at " + a1(pos));
            }
        }
        return sheet;
    }

    const ModelSpec& spec_;
    const StructureForest& forest_;
    const WorkbookLayout& layout_;
    RefMode mode_;
    EmitOptions options_;
    WorkbookGrid wb_;
    std::map<std::string, std::string> input_names_;
    std::map<std::string, std::string> range_names_;
    std::vector<std::string> slot_names_; // parallel to workings slots, Name mode
};

} // namespace detail

/// Renders laid-out sheets and formulas into a workbook. Address mode writes
/// cell addresses (ranges keep bare names); Name mode names every input,
/// range and Workings row. Throws INCONSISTENT_LAYOUT.
inline WorkbookGrid emit_workbook(const ModelSpec& spec, const StructureForest& forest,
                                  const WorkbookLayout& layout, RefMode mode,
                                  const EmitOptions& options = {}) {
    return detail::Emitter(spec, forest, layout, mode, options).run();
}

} // namespace ssc
