#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ssc/model.hpp"
#include <optional>

namespace ssc {

struct GraphNode {
    std::string id;
    DeclKind kind;
};

/// precedent -> dependent.
struct DepEdge {
    std::string precedent;
    std::string dependent;

    friend bool operator==(const DepEdge&, const DepEdge&) = default;
    friend auto operator<=>(const DepEdge&, const DepEdge&) = default;
};

struct DepGraph {
    std::vector<GraphNode> nodes;
    std::vector<DepEdge> edges; // grouped by dependent, first-occurrence order within

    const GraphNode* find(const std::string& id) const {
        for (const auto& n : nodes) {
            if (n.id == id) {
                return &n;
            }
        }
        return nullptr;
    }

    std::vector<std::string> precedents_of(const std::string& id) const {
        std::vector<std::string> out;
        for (const auto& e : edges) {
            if (e.dependent == id) {
                out.push_back(e.precedent);
            }
        }
        return out;
    }

    std::vector<std::string> dependents_of(const std::string& id) const {
        std::vector<std::string> out;
        for (const auto& e : edges) {
            if (e.precedent == id) {
                out.push_back(e.dependent);
            }
        }
        return out;
    }
};

/// One node per declared id (inputs and ranges in declaration order, then
/// functions); one edge per distinct reference in each formula.
inline DepGraph build_graph(const ModelSpec& spec) {
    DepGraph g;
    for (const auto& entry : spec.input_order) {
        if (entry.kind == InputKind::Scalar) {
            g.nodes.push_back({spec.inputs[entry.index].id, DeclKind::Input});
        } else {
            g.nodes.push_back({spec.ranges[entry.index].id, DeclKind::Range});
        }
    }
    for (const auto& f : spec.functions) {
        g.nodes.push_back({f.id, DeclKind::Function});
    }
    for (const auto& f : spec.functions) {
        if (!f.body) {
            continue;
        }
        for (const auto& use : refs_in_order(*f.body)) {
            if (spec.kind_of(use.target)) {
                g.edges.push_back({use.target, f.id});
            }
        }
    }
    return g;
}

/// Functions nothing else references, in declaration order. Throws NO_ROOT
/// when functions exist but every one has a dependent.
inline std::vector<std::string> find_roots(const DepGraph& g) {
    std::set<std::string> referenced;
    for (const auto& e : g.edges) {
        referenced.insert(e.precedent);
    }
    std::vector<std::string> roots;
    bool any_function = false;
    for (const auto& n : g.nodes) {
        if (n.kind != DeclKind::Function) {
            continue;
        }
        any_function = true;
        if (!referenced.count(n.id)) {
            roots.push_back(n.id);
        }
    }
    if (any_function && roots.empty()) {
        throw Error("NO_ROOT", "no root element: every function has a dependent (cycle)");
    }
    return roots;
}

/// Every elementary cycle once, rotated to start at its smallest id and
/// following precedent -> dependent edges. Sorted.
inline std::vector<std::vector<std::string>> detect_cycles(const DepGraph& g) {
    std::map<std::string, std::vector<std::string>> next;
    std::set<std::string> ids;
    for (const auto& n : g.nodes) {
        ids.insert(n.id);
    }
    for (const auto& e : g.edges) {
        ids.insert(e.precedent);
        ids.insert(e.dependent);
        auto& out = next[e.precedent];
        if (std::find(out.begin(), out.end(), e.dependent) == out.end()) {
            out.push_back(e.dependent);
        }
    }

    std::vector<std::vector<std::string>> cycles;
    for (const auto& start : ids) {
        std::vector<std::string> path{start};
        std::set<std::string> on_path{start};
        std::function<void(const std::string&)> walk = [&](const std::string& at) {
            auto it = next.find(at);
            if (it == next.end()) {
                return;
            }
            for (const auto& to : it->second) {
                if (to == start) {
                    cycles.push_back(path);
                } else if (to > start && !on_path.count(to)) {
                    path.push_back(to);
                    on_path.insert(to);
                    walk(to);
                    on_path.erase(to);
                    path.pop_back();
                }
            }
        };
        walk(start);
    }
    std::sort(cycles.begin(), cycles.end());
    return cycles;
}

enum class NodeKind { Function, Leaf, Constant, Iteration, Selection, ModuleRef, IndexedRef };

inline const char* to_string(NodeKind k) {
    switch (k) {
    case NodeKind::Function: return "Function";
    case NodeKind::Leaf: return "Leaf";
    case NodeKind::Constant: return "Constant";
    case NodeKind::Iteration: return "Iteration";
    case NodeKind::Selection: return "Selection";
    case NodeKind::ModuleRef: return "ModuleRef";
    case NodeKind::IndexedRef: return "IndexedRef";
    }
    return "?";
}

/// Element kind from the Jackson taxonomy. Throws UNKNOWN_ID.
inline NodeKind classify_node(const std::string& id, const ModelSpec& spec) {
    if (const auto* i = spec.find_input(id)) {
        return i->constant ? NodeKind::Constant : NodeKind::Leaf;
    }
    if (spec.find_range(id)) {
        return NodeKind::Iteration;
    }
    if (const auto* f = spec.find_function(id)) {
        if (f->body && std::holds_alternative<Select>(f->body->node)) {
            return NodeKind::Selection;
        }
        return NodeKind::Function;
    }
    throw Error("UNKNOWN_ID", "undeclared id '" + id + "'");
}

struct StructureNode {
    NodeKind kind = NodeKind::Function;
    std::string id;
    std::string label;
    std::vector<StructureNode> children;
    int depth = 0;
    std::string module; // target module name, ModuleRef only

    friend bool operator==(const StructureNode&, const StructureNode&) = default;
};

struct StructureModule {
    std::string name;
    StructureNode root;

    friend bool operator==(const StructureModule&, const StructureModule&) = default;
};

/// Jackson-like forest. modules.front() is the main module.
struct StructureForest {
    std::vector<StructureModule> modules;

    const StructureModule* find_module(const std::string& name) const {
        for (const auto& m : modules) {
            if (m.name == name) {
                return &m;
            }
        }
        return nullptr;
    }

    friend bool operator==(const StructureForest&, const StructureForest&) = default;
};

/// Strict turns every shared function that has precedents into a module.
/// Figure7Compat extracts a shared function only when it would otherwise be
/// expanded more than once inside one module, and expands sharing across
/// modules inline.
enum class ResolutionMode { Strict, Figure7Compat };

namespace detail {

class ForestBuilder {
public:
    ForestBuilder(const DepGraph& g, const ModelSpec& spec) : g_(g), spec_(spec) {}

    StructureForest build(const std::vector<std::string>& roots, const std::set<std::string>& extracted) {
        extracted_ = &extracted;
        module_names_.clear();
        StructureForest forest;
        std::vector<std::string> queue = roots;
        std::set<std::string> queued(roots.begin(), roots.end());
        for (const auto& r : roots) {
            module_name(r);
        }
        for (std::size_t i = 0; i < queue.size(); ++i) {
            const std::string root_id = queue[i];
            std::vector<std::string> refs;
            StructureNode root = expand(root_id, 0, root_id, refs);
            forest.modules.push_back({module_names_.at(root_id), std::move(root)});
            for (const auto& r : refs) {
                if (queued.insert(r).second) {
                    queue.push_back(r);
                }
            }
        }
        return forest;
    }

private:
    std::string module_name(const std::string& id) {
        auto it = module_names_.find(id);
        if (it != module_names_.end()) {
            return it->second;
        }
        std::string name = id;
        std::set<std::string> used;
        for (const auto& [_, n] : module_names_) {
            used.insert(n);
        }
        for (int k = 2; used.count(name); ++k) {
            name = id + std::to_string(k);
        }
        module_names_[id] = name;
        return name;
    }

    std::string label_of(const std::string& id) const {
        if (const auto* i = spec_.find_input(id)) return i->label;
        if (const auto* r = spec_.find_range(id)) return r->label;
        if (const auto* f = spec_.find_function(id)) return f->label;
        return id;
    }

    StructureNode expand(const std::string& id, int depth, const std::string& module_root,
                         std::vector<std::string>& module_refs) {
        StructureNode node;
        node.id = id;
        node.label = label_of(id);
        node.depth = depth;
        node.kind = classify_node(id, spec_);
        if (node.kind != NodeKind::Function && node.kind != NodeKind::Selection) {
            return node;
        }
        if (id != module_root && extracted_->count(id)) {
            node.kind = NodeKind::ModuleRef;
            node.module = module_name(id);
            module_refs.push_back(id);
            return node;
        }
        for (const auto& p : g_.precedents_of(id)) {
            node.children.push_back(expand(p, depth + 1, module_root, module_refs));
        }
        return node;
    }

    const DepGraph& g_;
    const ModelSpec& spec_;
    const std::set<std::string>* extracted_ = nullptr;
    std::map<std::string, std::string> module_names_;
};

inline void preorder(const StructureNode& n, const std::function<void(const StructureNode&)>& visit) {
    visit(n);
    for (const auto& c : n.children) {
        preorder(c, visit);
    }
}

// First function expanded more than once within a single module, if any.
inline std::optional<std::string> first_duplicated_function(const StructureForest& forest) {
    for (const auto& m : forest.modules) {
        std::map<std::string, int> counts;
        std::vector<std::string> order;
        preorder(m.root, [&](const StructureNode& n) {
            if (n.kind == NodeKind::Function || n.kind == NodeKind::Selection) {
                if (counts[n.id]++ == 0) {
                    order.push_back(n.id);
                }
            }
        });
        for (const auto& id : order) {
            if (counts[id] > 1) {
                return id;
            }
        }
    }
    return std::nullopt;
}

} // namespace detail

/// Resolves the dependency graph into a forest of trees. Shared elements
/// without precedents are duplicated; shared elements with precedents become
/// modules. Throws CYCLE.
inline StructureForest resolve_to_forest(const DepGraph& g, const ModelSpec& spec,
                                         ResolutionMode mode = ResolutionMode::Strict) {
    auto cycles = detect_cycles(g);
    if (!cycles.empty()) {
        std::string text;
        for (const auto& id : cycles.front()) {
            text += id + " -> ";
        }
        text += cycles.front().front();
        throw Error("CYCLE", "cyclic dependency: " + text);
    }
    std::vector<std::string> roots = find_roots(g);
    detail::ForestBuilder builder(g, spec);
    std::set<std::string> extracted;

    if (mode == ResolutionMode::Strict) {
        for (const auto& n : g.nodes) {
            if (n.kind == DeclKind::Function && g.dependents_of(n.id).size() >= 2 &&
                !g.precedents_of(n.id).empty()) {
                extracted.insert(n.id);
            }
        }
        return builder.build(roots, extracted);
    }

    for (;;) {
        StructureForest forest = builder.build(roots, extracted);
        auto dup = detail::first_duplicated_function(forest);
        if (!dup) {
            return forest;
        }
        extracted.insert(*dup);
    }
}

/// ASCII rendering used by `ssc tree`: one node per line, two spaces per
/// level; `*` marks an iteration, ` C` a constant, ` o` a selection and
/// ` →M` a reference to module M.
inline std::string format_tree(const StructureForest& forest) {
    std::string out;
    for (const auto& m : forest.modules) {
        out += "module " + m.name + "\n";
        detail::preorder(m.root, [&](const StructureNode& n) {
            out += std::string(static_cast<std::size_t>(n.depth) * 2, ' ') + n.id;
            switch (n.kind) {
            case NodeKind::Iteration: out += "*"; break;
            case NodeKind::Constant: out += " C"; break;
            case NodeKind::Selection: out += " o"; break;
            case NodeKind::ModuleRef: out += " →" + n.module; break;
            case NodeKind::IndexedRef: out += "[i]"; break;
            default: break;
            }
            out += "\n";
        });
    }
    return out;
}

} // namespace ssc
