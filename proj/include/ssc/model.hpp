#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ssc/decimal.hpp"
#include "ssc/expr.hpp"
#include "ssc/naming.hpp"

namespace ssc {

/// 1-based position of a token in model source text.
struct SourceSpan {
    int line = 1;
    int column = 1;
    int length = 1;

    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

struct InputItem {
    std::string id;
    std::string label;
    Decimal value;
    bool constant = false;
    std::optional<SourceSpan> span;
};

struct RangeMember {
    std::string label;
    Decimal value;
};

/// A set of related inputs. Members are never referenced individually.
struct InputRange {
    std::string id;
    std::string label;
    std::vector<RangeMember> members;
    std::optional<SourceSpan> span;
};

struct FunctionDef {
    std::string id;
    std::string label;
    ExprPtr body;
    std::optional<SourceSpan> span;
};

struct OutputRow {
    std::string label;
    std::string ref;
    std::optional<SourceSpan> span;
};

struct OutputBlock {
    std::string title;
    std::vector<OutputRow> rows;
    std::optional<SourceSpan> span;
};

enum class InputKind { Scalar, Range };

/// Position of a scalar input or range in the interleaved input declaration
/// order, which is the Input sheet row order.
struct InputOrderEntry {
    InputKind kind;
    std::size_t index;

    friend bool operator==(const InputOrderEntry&, const InputOrderEntry&) = default;
};

enum class DeclKind { Input, Range, Function };

struct ModelSpec {
    std::string title;
    std::vector<InputItem> inputs;
    std::vector<InputRange> ranges;
    std::vector<FunctionDef> functions;
    std::vector<OutputBlock> outputs;
    std::vector<InputOrderEntry> input_order;

    void add_input(InputItem item) {
        input_order.push_back({InputKind::Scalar, inputs.size()});
        inputs.push_back(std::move(item));
    }

    void add_range(InputRange range) {
        input_order.push_back({InputKind::Range, ranges.size()});
        ranges.push_back(std::move(range));
    }

    const InputItem* find_input(const std::string& id) const {
        for (const auto& i : inputs) {
            if (i.id == id) {
                return &i;
            }
        }
        return nullptr;
    }

    const InputRange* find_range(const std::string& id) const {
        for (const auto& r : ranges) {
            if (r.id == id) {
                return &r;
            }
        }
        return nullptr;
    }

    const FunctionDef* find_function(const std::string& id) const {
        for (const auto& f : functions) {
            if (f.id == id) {
                return &f;
            }
        }
        return nullptr;
    }

    std::optional<DeclKind> kind_of(const std::string& id) const {
        if (find_input(id)) {
            return DeclKind::Input;
        }
        if (find_range(id)) {
            return DeclKind::Range;
        }
        if (find_function(id)) {
            return DeclKind::Function;
        }
        return std::nullopt;
    }
};

// Equality ignores source spans.
inline bool operator==(const InputItem& a, const InputItem& b) {
    return a.id == b.id && a.label == b.label && a.value == b.value && a.constant == b.constant;
}
inline bool operator==(const RangeMember& a, const RangeMember& b) {
    return a.label == b.label && a.value == b.value;
}
inline bool operator==(const InputRange& a, const InputRange& b) {
    return a.id == b.id && a.label == b.label && a.members == b.members;
}
inline bool operator==(const FunctionDef& a, const FunctionDef& b) {
    return a.id == b.id && a.label == b.label && expr_equal(a.body, b.body);
}
inline bool operator==(const OutputRow& a, const OutputRow& b) {
    return a.label == b.label && a.ref == b.ref;
}
inline bool operator==(const OutputBlock& a, const OutputBlock& b) {
    return a.title == b.title && a.rows == b.rows;
}
inline bool operator==(const ModelSpec& a, const ModelSpec& b) {
    return a.title == b.title && a.inputs == b.inputs && a.ranges == b.ranges &&
           a.functions == b.functions && a.outputs == b.outputs && a.input_order == b.input_order;
}

struct Location {
    std::string declaration; // e.g. "func NetProfit"
    std::optional<SourceSpan> span;
};

struct Diagnostic {
    std::string code;
    Location location;
    std::string message;
};

/// Thrown by load_model when a parsed model fails validation.
class ModelError : public Error {
public:
    explicit ModelError(std::vector<Diagnostic> diagnostics)
        : Error(diagnostics.empty() ? "INVALID_MODEL" : diagnostics.front().code,
                diagnostics.empty() ? "invalid model" : diagnostics.front().message),
          diagnostics_(std::move(diagnostics)) {}

    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

namespace detail {

inline void check_expr_refs(const ModelSpec& spec, const FunctionDef& f, const Expr& e,
                            bool in_aggregate, std::vector<Diagnostic>& out);

inline void check_ref(const ModelSpec& spec, const FunctionDef& f, const std::string& target,
                      bool as_range, std::vector<Diagnostic>& out) {
    Location loc{"func " + f.id, f.span};
    if (target == f.id) {
        out.push_back({"SELF_REFERENCE", loc, "function '" + f.id + "' references itself"});
        return;
    }
    auto kind = spec.kind_of(target);
    if (!kind) {
        out.push_back({"UNDECLARED_REF", loc,
                       "function '" + f.id + "' references undeclared id '" + target + "'"});
        return;
    }
    if (as_range && *kind != DeclKind::Range) {
        out.push_back({"NOT_A_RANGE", loc, "'" + target + "' is not an input range"});
    }
    if (!as_range && *kind == DeclKind::Range) {
        out.push_back({"RANGE_OUTSIDE_AGGREGATE", loc,
                       "range '" + target + "' may only be referenced inside SUM"});
    }
}

inline void check_expr_refs(const ModelSpec& spec, const FunctionDef& f, const Expr& e,
                            bool in_aggregate, std::vector<Diagnostic>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Ref>) {
                check_ref(spec, f, n.target, false, out);
            } else if constexpr (std::is_same_v<T, RangeRef>) {
                if (!in_aggregate) {
                    out.push_back({"RANGE_OUTSIDE_AGGREGATE", {"func " + f.id, f.span},
                                   "range '" + n.target + "' may only be referenced inside SUM"});
                }
                check_ref(spec, f, n.target, true, out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                check_expr_refs(spec, f, *n.lhs, false, out);
                check_expr_refs(spec, f, *n.rhs, false, out);
            } else if constexpr (std::is_same_v<T, Aggregate>) {
                if (n.args.empty()) {
                    out.push_back({"EMPTY_AGGREGATE", {"func " + f.id, f.span},
                                   "SUM needs at least one argument"});
                }
                for (const auto& a : n.args) {
                    check_ref(spec, f, arg_target(a), arg_is_range(a), out);
                }
            } else if constexpr (std::is_same_v<T, Select>) {
                if (n.options.empty()) {
                    out.push_back({"EMPTY_SELECT", {"func " + f.id, f.span},
                                   "SELECT needs at least one option"});
                }
                for (const auto& o : n.options) {
                    check_expr_refs(spec, f, *o.guard.lhs, false, out);
                    check_expr_refs(spec, f, *o.guard.rhs, false, out);
                    check_expr_refs(spec, f, *o.value, false, out);
                }
            }
        },
        e.node);
}

} // namespace detail

/// Checks every ModelSpec invariant. Empty result means the model is valid.
/// Cycles longer than a self-reference are the structurer's concern.
inline std::vector<Diagnostic> validate_model(const ModelSpec& spec) {
    std::vector<Diagnostic> out;

    std::map<std::string, std::string> seen; // id -> first declaration
    auto declare = [&](const std::string& id, const std::string& what,
                       const std::optional<SourceSpan>& span) {
        auto [it, inserted] = seen.emplace(id, what);
        if (!inserted) {
            out.push_back({"DUPLICATE_ID", {what + " " + id, span},
                           "'" + id + "' is already declared as " + it->second});
        }
    };
    auto check_label = [&](const std::string& label, const std::string& where,
                           const std::optional<SourceSpan>& span) {
        if (!try_derive_base_name(label)) {
            out.push_back({"UNNAMEABLE_LABEL", {where, span},
                           "label '" + label + "' leaves no name characters"});
        }
    };

    for (const auto& i : spec.inputs) {
        declare(i.id, "input", i.span);
        check_label(i.label, "input " + i.id, i.span);
    }
    for (const auto& r : spec.ranges) {
        declare(r.id, "range", r.span);
        check_label(r.label, "range " + r.id, r.span);
        if (r.members.empty()) {
            out.push_back({"EMPTY_RANGE", {"range " + r.id, r.span},
                           "range '" + r.id + "' has no members"});
        }
    }
    for (const auto& f : spec.functions) {
        declare(f.id, "func", f.span);
        check_label(f.label, "func " + f.id, f.span);
    }

    for (const auto& f : spec.functions) {
        if (!f.body) {
            out.push_back({"MISSING_BODY", {"func " + f.id, f.span}, "function has no formula"});
            continue;
        }
        if (refs_in_order(*f.body).empty()) {
            out.push_back({"LITERAL_ONLY_FUNCTION", {"func " + f.id, f.span},
                           "function '" + f.id + "' must reference at least one element"});
        }
        detail::check_expr_refs(spec, f, *f.body, false, out);
    }

    std::set<std::string> referenced_inputs;
    for (const auto& f : spec.functions) {
        if (f.body) {
            for (const auto& u : refs_in_order(*f.body)) {
                referenced_inputs.insert(u.target);
            }
        }
    }
    for (const auto& block : spec.outputs) {
        for (const auto& row : block.rows) {
            Location loc{"output \"" + block.title + "\"", row.span};
            auto kind = spec.kind_of(row.ref);
            if (!kind) {
                out.push_back({"UNDECLARED_REF", loc,
                               "output row references undeclared id '" + row.ref + "'"});
            } else if (*kind == DeclKind::Range) {
                out.push_back({"OUTPUT_BAD_TARGET", loc,
                               "output row may not reference range '" + row.ref + "'"});
            } else if (*kind == DeclKind::Input && !referenced_inputs.count(row.ref)) {
                out.push_back({"OUTPUT_BAD_TARGET", loc,
                               "output row references input '" + row.ref +
                                   "' which no function uses"});
            }
        }
    }
    return out;
}

} // namespace ssc
