#pragma once

#include <map>
#include <string>
#include <vector>

#include "ssc/address.hpp"
#include "ssc/decimal.hpp"
#include "ssc/error.hpp"

namespace ssc {

enum class RefMode { Address, Name };

inline const char* to_string(RefMode m) { return m == RefMode::Address ? "Address" : "Name"; }

enum class CellKind { Empty, Label, Formula, Number };

struct Cell {
    CellKind kind = CellKind::Empty;
    std::string text;  // label text, or formula text starting with '='
    Decimal value;     // Number only
    std::string node;  // originating node id for slot cells, else empty

    static Cell label(std::string text) { return {CellKind::Label, std::move(text), {}, {}}; }
    static Cell formula(std::string text, std::string node = {}) {
        return {CellKind::Formula, std::move(text), {}, std::move(node)};
    }
    static Cell number(Decimal value, std::string node = {}) {
        return {CellKind::Number, {}, value, std::move(node)};
    }

    friend bool operator==(const Cell& a, const Cell& b) {
        return a.kind == b.kind && a.text == b.text && a.node == b.node &&
               (a.kind != CellKind::Number ||
                (a.value == b.value && a.value.scale() == b.value.scale()));
    }
};

struct Sheet {
    std::string name;
    std::map<GridPos, Cell> cells;

    const Cell* at(GridPos p) const {
        auto it = cells.find(p);
        return it == cells.end() ? nullptr : &it->second;
    }

    /// Last used row and column (0, 0 when empty).
    GridPos extent() const {
        GridPos e{0, 0};
        for (const auto& [p, c] : cells) {
            if (c.kind == CellKind::Empty) {
                continue;
            }
            e.row = std::max(e.row, p.row);
            e.col = std::max(e.col, p.col);
        }
        return e;
    }

    friend bool operator==(const Sheet&, const Sheet&) = default;
};

/// Target of a workbook name: one cell, or an extent when `last` differs or
/// `is_range` is set.
struct NameTarget {
    std::string sheet;
    GridPos first;
    GridPos last;
    bool is_range = false;

    std::string to_string() const {
        std::string s = sheet + "!" + a1(first);
        if (is_range) {
            s += ":" + a1(last);
        }
        return s;
    }

    friend bool operator==(const NameTarget&, const NameTarget&) = default;
};

struct WorkbookGrid {
    std::string model;
    RefMode ref_mode = RefMode::Address;
    std::vector<Sheet> sheets;
    std::map<std::string, NameTarget> names;

    const Sheet* find_sheet(const std::string& name) const {
        for (const auto& s : sheets) {
            if (s.name == name) {
                return &s;
            }
        }
        return nullptr;
    }

    Sheet* find_sheet(const std::string& name) {
        for (auto& s : sheets) {
            if (s.name == name) {
                return &s;
            }
        }
        return nullptr;
    }

    friend bool operator==(const WorkbookGrid&, const WorkbookGrid&) = default;
};

} // namespace ssc
