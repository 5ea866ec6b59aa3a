#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ssc/decimal.hpp"

namespace ssc {

enum class BinaryOp { Add, Sub, Mul, Div };
enum class CompareOp { Lt, Le, Gt, Ge, Eq, Ne };
enum class AggregateKind { Sum };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Literal {
    Decimal value;
};

/// Reference to a single referenceable unit. In a model this is an
/// identifier; in an emitted grid formula it may also be a cell address
/// ("C7", "Input!B5") or a workbook name.
struct Ref {
    std::string target;
};

/// Reference to a set of values: a declared input range, a named range, or a
/// cell extent ("F11:F13"). Only valid as an aggregate argument.
struct RangeRef {
    std::string target;
};

struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};

using AggregateArg = std::variant<Ref, RangeRef>;

struct Aggregate {
    AggregateKind kind = AggregateKind::Sum;
    std::vector<AggregateArg> args;
};

struct Guard {
    CompareOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};

struct SelectOption {
    Guard guard;
    ExprPtr value;
};

/// Mutually exclusive options; exactly one guard must hold when evaluated.
struct Select {
    std::vector<SelectOption> options;
};

struct Expr {
    std::variant<Literal, Ref, RangeRef, Binary, Aggregate, Select> node;
};

inline ExprPtr make_literal(Decimal v) { return std::make_shared<const Expr>(Expr{Literal{v}}); }
inline ExprPtr make_ref(std::string target) {
    return std::make_shared<const Expr>(Expr{Ref{std::move(target)}});
}
inline ExprPtr make_range_ref(std::string target) {
    return std::make_shared<const Expr>(Expr{RangeRef{std::move(target)}});
}
inline ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<const Expr>(Expr{Binary{op, std::move(lhs), std::move(rhs)}});
}
inline ExprPtr make_sum(std::vector<AggregateArg> args) {
    return std::make_shared<const Expr>(Expr{Aggregate{AggregateKind::Sum, std::move(args)}});
}
inline ExprPtr make_select(std::vector<SelectOption> options) {
    return std::make_shared<const Expr>(Expr{Select{std::move(options)}});
}

inline const std::string& arg_target(const AggregateArg& a) {
    return std::visit([](const auto& r) -> const std::string& { return r.target; }, a);
}

inline bool arg_is_range(const AggregateArg& a) { return std::holds_alternative<RangeRef>(a); }

// Structural equality.
inline bool operator==(const Expr& a, const Expr& b);

inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) {
        return a == b;
    }
    return *a == *b;
}

inline bool operator==(const Literal& a, const Literal& b) { return a.value == b.value; }
inline bool operator==(const Ref& a, const Ref& b) { return a.target == b.target; }
inline bool operator==(const RangeRef& a, const RangeRef& b) { return a.target == b.target; }
inline bool operator==(const Binary& a, const Binary& b) {
    return a.op == b.op && expr_equal(a.lhs, b.lhs) && expr_equal(a.rhs, b.rhs);
}
inline bool operator==(const Aggregate& a, const Aggregate& b) {
    return a.kind == b.kind && a.args == b.args;
}
inline bool operator==(const Guard& a, const Guard& b) {
    return a.op == b.op && expr_equal(a.lhs, b.lhs) && expr_equal(a.rhs, b.rhs);
}
inline bool operator==(const SelectOption& a, const SelectOption& b) {
    return a.guard == b.guard && expr_equal(a.value, b.value);
}
inline bool operator==(const Select& a, const Select& b) { return a.options == b.options; }
inline bool operator==(const Expr& a, const Expr& b) { return a.node == b.node; }

/// A referenced name and whether it was referenced as a range.
struct RefUse {
    std::string target;
    bool is_range = false;

    friend bool operator==(const RefUse&, const RefUse&) = default;
};

namespace detail {

inline void collect_refs(const Expr& e, std::vector<RefUse>& out) {
    auto add = [&out](const std::string& target, bool is_range) {
        for (const auto& u : out) {
            if (u.target == target) {
                return;
            }
        }
        out.push_back({target, is_range});
    };
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Ref>) {
                add(n.target, false);
            } else if constexpr (std::is_same_v<T, RangeRef>) {
                add(n.target, true);
            } else if constexpr (std::is_same_v<T, Binary>) {
                collect_refs(*n.lhs, out);
                collect_refs(*n.rhs, out);
            } else if constexpr (std::is_same_v<T, Aggregate>) {
                for (const auto& a : n.args) {
                    add(arg_target(a), arg_is_range(a));
                }
            } else if constexpr (std::is_same_v<T, Select>) {
                for (const auto& o : n.options) {
                    collect_refs(*o.guard.lhs, out);
                    collect_refs(*o.guard.rhs, out);
                    collect_refs(*o.value, out);
                }
            }
        },
        e.node);
}

} // namespace detail

/// Distinct references in first-occurrence (left-to-right) order.
inline std::vector<RefUse> refs_in_order(const Expr& e) {
    std::vector<RefUse> out;
    detail::collect_refs(e, out);
    return out;
}

/// Rebuilds `e` with every Ref/RangeRef target passed through `rename`.
/// `rename(target, is_range)` returns the replacement target text.
inline ExprPtr rename_refs(const ExprPtr& e,
                           const std::function<std::string(const std::string&, bool)>& rename) {
    return std::visit(
        [&](const auto& n) -> ExprPtr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Literal>) {
                return e;
            } else if constexpr (std::is_same_v<T, Ref>) {
                return make_ref(rename(n.target, false));
            } else if constexpr (std::is_same_v<T, RangeRef>) {
                return make_range_ref(rename(n.target, true));
            } else if constexpr (std::is_same_v<T, Binary>) {
                return make_binary(n.op, rename_refs(n.lhs, rename), rename_refs(n.rhs, rename));
            } else if constexpr (std::is_same_v<T, Aggregate>) {
                std::vector<AggregateArg> args;
                for (const auto& a : n.args) {
                    if (arg_is_range(a)) {
                        args.emplace_back(RangeRef{rename(arg_target(a), true)});
                    } else {
                        args.emplace_back(Ref{rename(arg_target(a), false)});
                    }
                }
                return make_sum(std::move(args));
            } else {
                std::vector<SelectOption> options;
                for (const auto& o : n.options) {
                    options.push_back({Guard{o.guard.op, rename_refs(o.guard.lhs, rename),
                                             rename_refs(o.guard.rhs, rename)},
                                       rename_refs(o.value, rename)});
                }
                return make_select(std::move(options));
            }
        },
        e->node);
}

inline const char* to_symbol(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    }
    return "?";
}

inline const char* to_symbol(CompareOp op) {
    switch (op) {
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "<>";
    }
    return "?";
}

namespace detail {

inline int precedence(BinaryOp op) {
    return (op == BinaryOp::Add || op == BinaryOp::Sub) ? 1 : 2;
}

inline void pretty(const Expr& e, std::string& out);

// Operands are parenthesized only when the tree shape would otherwise be lost:
// a lower-precedence child anywhere, or an equal-precedence right child.
inline void pretty_operand(const Expr& child, int parent_prec, bool right, std::string& out) {
    bool wrap = false;
    if (const auto* b = std::get_if<Binary>(&child.node)) {
        int p = precedence(b->op);
        wrap = p < parent_prec || (right && p == parent_prec);
    }
    if (wrap) {
        out.push_back('(');
    }
    pretty(child, out);
    if (wrap) {
        out.push_back(')');
    }
}

inline void pretty(const Expr& e, std::string& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Literal>) {
                if (n.value.is_negative()) {
                    out += "(" + n.value.to_string() + ")";
                } else {
                    out += n.value.to_string();
                }
            } else if constexpr (std::is_same_v<T, Ref>) {
                out += n.target;
            } else if constexpr (std::is_same_v<T, RangeRef>) {
                out += n.target;
            } else if constexpr (std::is_same_v<T, Binary>) {
                int p = precedence(n.op);
                pretty_operand(*n.lhs, p, false, out);
                out += to_symbol(n.op);
                pretty_operand(*n.rhs, p, true, out);
            } else if constexpr (std::is_same_v<T, Aggregate>) {
                out += "SUM(";
                for (std::size_t i = 0; i < n.args.size(); ++i) {
                    if (i > 0) {
                        out += "; ";
                    }
                    out += arg_target(n.args[i]);
                }
                out += ")";
            } else {
                out += "SELECT(";
                for (std::size_t i = 0; i < n.options.size(); ++i) {
                    if (i > 0) {
                        out += "; ";
                    }
                    const auto& o = n.options[i];
                    pretty(*o.guard.lhs, out);
                    out += to_symbol(o.guard.op);
                    pretty(*o.guard.rhs, out);
                    out += ", ";
                    pretty(*o.value, out);
                }
                out += ")";
            }
        },
        e.node);
}

} // namespace detail

/// Canonical formula text without the leading '='.
inline std::string pretty_expr(const Expr& e) {
    std::string out;
    detail::pretty(e, out);
    return out;
}

inline std::string pretty_expr(const ExprPtr& e) { return pretty_expr(*e); }

} // namespace ssc
