#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ssc/emitter.hpp"
#include "ssc/grid.hpp"
#include "ssc/grid_refs.hpp"
#include "ssc/model.hpp"

namespace ssc {

/// Decimal value per input, range member ("Range[i]") and function.
struct ValueMap {
    std::map<std::string, Decimal> values;
    int scale = 2;

    friend bool operator==(const ValueMap&, const ValueMap&) = default;
};

namespace detail {

struct ValueSource {
    std::function<Decimal(const std::string&)> scalar;
    std::function<std::vector<Decimal>(const std::string&)> range;
};

inline Decimal eval_expr(const Expr& e, const ValueSource& src, int scale);

inline bool eval_guard(const Guard& g, const ValueSource& src, int scale) {
    Decimal l = eval_expr(*g.lhs, src, scale);
    Decimal r = eval_expr(*g.rhs, src, scale);
    switch (g.op) {
    case CompareOp::Lt: return l < r;
    case CompareOp::Le: return l <= r;
    case CompareOp::Gt: return l > r;
    case CompareOp::Ge: return l >= r;
    case CompareOp::Eq: return l == r;
    case CompareOp::Ne: return l != r;
    }
    return false;
}

// Every intermediate result is held at `scale`; +/- are exact there,
// x and / round half-even.
inline Decimal eval_expr(const Expr& e, const ValueSource& src, int scale) {
    return std::visit(
        [&](const auto& n) -> Decimal {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Literal>) {
                return n.value.rescaled(scale);
            } else if constexpr (std::is_same_v<T, Ref>) {
                return src.scalar(n.target).rescaled(scale);
            } else if constexpr (std::is_same_v<T, RangeRef>) {
                throw Error("RANGE_OUTSIDE_AGGREGATE", "range '" + n.target + "' used as a value");
            } else if constexpr (std::is_same_v<T, Binary>) {
                Decimal l = eval_expr(*n.lhs, src, scale);
                Decimal r = eval_expr(*n.rhs, src, scale);
                switch (n.op) {
                case BinaryOp::Add: return (l + r).rescaled(scale);
                case BinaryOp::Sub: return (l - r).rescaled(scale);
                case BinaryOp::Mul: return Decimal::multiply(l, r, scale);
                case BinaryOp::Div: return Decimal::divide(l, r, scale);
                }
                return Decimal::from_units(0, scale);
            } else if constexpr (std::is_same_v<T, Aggregate>) {
                Decimal total = Decimal::from_units(0, scale);
                for (const auto& a : n.args) {
                    if (arg_is_range(a)) {
                        for (const auto& v : src.range(arg_target(a))) {
                            total = total + v.rescaled(scale);
                        }
                    } else {
                        total = total + src.scalar(arg_target(a)).rescaled(scale);
                    }
                }
                return total;
            } else {
                const Expr* chosen = nullptr;
                int matches = 0;
                for (const auto& o : n.options) {
                    if (eval_guard(o.guard, src, scale)) {
                        ++matches;
                        chosen = o.value.get();
                    }
                }
                if (matches != 1) {
                    throw Error("SELECT_AMBIGUOUS", "selection has " + std::to_string(matches) +
                                                        " true guards; exactly one is required");
                }
                return eval_expr(*chosen, src, scale);
            }
        },
        e.node);
}

} // namespace detail

/// Evaluates every function in Kahn topological order (ties broken by
/// declaration order). Throws CYCLE, SELECT_AMBIGUOUS, DIVIDE_BY_ZERO.
inline ValueMap evaluate_spec(const ModelSpec& spec, int scale = 2) {
    ValueMap out;
    out.scale = scale;
    for (const auto& i : spec.inputs) {
        out.values[i.id] = i.value.rescaled(scale);
    }
    for (const auto& r : spec.ranges) {
        for (std::size_t k = 0; k < r.members.size(); ++k) {
            out.values[member_key(r.id, k)] = r.members[k].value.rescaled(scale);
        }
    }

    const std::size_t n = spec.functions.size();
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) {
        index[spec.functions[i].id] = i;
    }
    std::vector<std::vector<std::size_t>> dependents(n);
    std::vector<int> pending(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& use : refs_in_order(*spec.functions[i].body)) {
            auto it = index.find(use.target);
            if (it != index.end()) {
                dependents[it->second].push_back(i);
                ++pending[i];
            }
        }
    }
    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (pending[i] == 0) {
            ready.insert(i);
        }
    }

    detail::ValueSource src;
    src.scalar = [&](const std::string& id) -> Decimal {
        auto it = out.values.find(id);
        if (it == out.values.end() || spec.find_range(id)) {
            throw Error("UNRESOLVED_REF", "no scalar value for '" + id + "'");
        }
        return it->second;
    };
    src.range = [&](const std::string& id) {
        const auto* r = spec.find_range(id);
        if (!r) {
            throw Error("UNRESOLVED_REF", "no range named '" + id + "'");
        }
        std::vector<Decimal> values;
        for (const auto& m : r->members) {
            values.push_back(m.value);
        }
        return values;
    };

    std::size_t done = 0;
    while (!ready.empty()) {
        std::size_t i = *ready.begin();
        ready.erase(ready.begin());
        const auto& f = spec.functions[i];
        out.values[f.id] = detail::eval_expr(*f.body, src, scale);
        ++done;
        for (std::size_t d : dependents[i]) {
            if (--pending[d] == 0) {
                ready.insert(d);
            }
        }
    }
    if (done != n) {
        throw Error("CYCLE", "functions form a cycle; no evaluation order exists");
    }
    return out;
}

namespace detail {

class GridEvaluator {
public:
    GridEvaluator(const WorkbookGrid& wb, int scale) : wb_(wb), scale_(scale) {}

    Decimal cell_value(const std::string& sheet_name, GridPos pos) {
        auto key = std::make_pair(sheet_name, pos);
        if (auto it = memo_.find(key); it != memo_.end()) {
            return it->second;
        }
        const Sheet* sheet = wb_.find_sheet(sheet_name);
        const Cell* cell = sheet ? sheet->at(pos) : nullptr;
        if (!cell || cell->kind == CellKind::Empty || cell->kind == CellKind::Label) {
            throw Error("UNRESOLVED_REF", sheet_name + "!" + a1(pos) + " holds no value");
        }
        if (cell->kind == CellKind::Number) {
            return memo_[key] = cell->value.rescaled(scale_);
        }
        if (!visiting_.insert(key).second) {
            throw Error("CYCLE", "circular reference through " + sheet_name + "!" + a1(pos));
        }
        ExprPtr expr;
        try {
            expr = parse_cell_formula(wb_, cell->text);
        } catch (const ParseError& e) {
            throw Error("UNRESOLVED_REF", sheet_name + "!" + a1(pos) + ": " + e.what());
        }
        ValueSource src;
        src.scalar = [&](const std::string& target) {
            auto r = resolve(sheet_name, target);
            if (r.is_range && r.first != r.last) {
                throw Error("UNRESOLVED_REF", "'" + target + "' is a range, not a cell");
            }
            return cell_value(r.sheet, r.first);
        };
        src.range = [&](const std::string& target) {
            auto r = resolve(sheet_name, target);
            std::vector<Decimal> values;
            const Sheet* s = wb_.find_sheet(r.sheet);
            for (int row = r.first.row; row <= r.last.row; ++row) {
                for (int col = r.first.col; col <= r.last.col; ++col) {
                    const Cell* c = s->at({row, col});
                    if (c && (c->kind == CellKind::Number || c->kind == CellKind::Formula)) {
                        values.push_back(cell_value(r.sheet, {row, col}));
                    }
                }
            }
            return values;
        };
        Decimal v = eval_expr(*expr, src, scale_);
        visiting_.erase(key);
        return memo_[key] = v;
    }

private:
    ResolvedRef resolve(const std::string& sheet, const std::string& target) const {
        auto r = resolve_grid_ref(wb_, sheet, target);
        if (!r) {
            throw Error("UNRESOLVED_REF", "cannot resolve '" + target + "' from sheet " + sheet);
        }
        return *r;
    }

    const WorkbookGrid& wb_;
    int scale_;
    std::map<std::pair<std::string, GridPos>, Decimal> memo_;
    std::set<std::pair<std::string, GridPos>> visiting_;
};

} // namespace detail

/// Interprets every formula in the grid and collects the values of cells
/// tagged with an originating node. Throws UNRESOLVED_REF, CYCLE,
/// GRID_INCONSISTENT.
inline ValueMap evaluate_grid(const WorkbookGrid& wb, int scale = 2) {
    detail::GridEvaluator ev(wb, scale);
    ValueMap out;
    out.scale = scale;
    for (const auto& sheet : wb.sheets) {
        for (const auto& [pos, cell] : sheet.cells) {
            if (cell.kind != CellKind::Formula && cell.kind != CellKind::Number) {
                continue;
            }
            Decimal v = ev.cell_value(sheet.name, pos);
            if (cell.node.empty()) {
                continue;
            }
            auto [it, inserted] = out.values.emplace(cell.node, v);
            if (!inserted && it->second != v) {
                throw Error("GRID_INCONSISTENT", "copies of '" + cell.node + "' disagree: " +
                                                     it->second.to_string() + " vs " + v.to_string());
            }
        }
    }
    return out;
}

struct ValueDiff {
    std::string id;
    Decimal a;
    Decimal b;
};

/// Entries whose values differ, sorted by id. Throws KEY_MISMATCH.
inline std::vector<ValueDiff> diff_values(const ValueMap& a, const ValueMap& b) {
    std::vector<ValueDiff> out;
    auto ia = a.values.begin();
    auto ib = b.values.begin();
    for (; ia != a.values.end() && ib != b.values.end(); ++ia, ++ib) {
        if (ia->first != ib->first) {
            break;
        }
        if (ia->second != ib->second) {
            out.push_back({ia->first, ia->second, ib->second});
        }
    }
    if (ia != a.values.end() || ib != b.values.end()) {
        std::string key = ia != a.values.end() ? ia->first : ib->first;
        throw Error("KEY_MISMATCH", "value maps have different keys (at '" + key + "')");
    }
    return out;
}

} // namespace ssc
