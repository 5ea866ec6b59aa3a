#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>

#include "ssc/structurer.hpp"

namespace testing_support {

// Empty when the forest satisfies the tree property: depths increase by one
// per level, no computing node repeats inside a module, every module
// reference names another existing module, and module references are
// acyclic. Otherwise a description of the first problem.
inline std::string tree_property_problem(const ssc::StructureForest& forest) {
    std::map<std::string, std::set<std::string>> refs;
    for (const auto& m : forest.modules) {
        std::set<std::string> computing;
        std::string problem;
        std::function<void(const ssc::StructureNode&, int)> walk = [&](const ssc::StructureNode& n, int depth) {
            if (!problem.empty()) return;
            if (n.depth != depth) problem = "bad depth at " + n.id;
            if (n.kind == ssc::NodeKind::Function || n.kind == ssc::NodeKind::Selection) {
                if (!computing.insert(n.id).second) problem = n.id + " computed twice in " + m.name;
            }
            if (n.kind == ssc::NodeKind::ModuleRef) {
                if (!forest.find_module(n.module) || n.module == m.name) problem = "bad module ref " + n.module;
                refs[m.name].insert(n.module);
                if (!n.children.empty()) problem = "module ref with children";
            }
            for (const auto& c : n.children) walk(c, depth + 1);
        };
        walk(m.root, 0);
        if (!problem.empty()) return problem;
    }
    std::set<std::string> done;
    std::set<std::string> active;
    std::function<bool(const std::string&)> cyclic = [&](const std::string& name) {
        if (active.count(name)) return true;
        if (done.count(name)) return false;
        active.insert(name);
        for (const auto& t : refs[name]) {
            if (cyclic(t)) return true;
        }
        active.erase(name);
        done.insert(name);
        return false;
    };
    for (const auto& m : forest.modules) {
        if (cyclic(m.name)) return "module references form a cycle";
    }
    return {};
}

} // namespace testing_support
