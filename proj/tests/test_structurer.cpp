#include <gtest/gtest.h>

#include <cctype>

#include "ssc/parser.hpp"
#include "ssc/structurer.hpp"
#include "support/files.hpp"
#include "support/forest_checks.hpp"
#include "support/generator.hpp"
#include "support/oracle.hpp"

using namespace ssc;

namespace {

ModelSpec shared() { return load_model(testing_support::fixture("shared_elements.ssm")); }

std::vector<std::string> ids_of(const StructureNode& n) {
    std::vector<std::string> out;
    for (const auto& c : n.children) out.push_back(c.id);
    return out;
}

const StructureNode& child(const StructureNode& n, const std::string& id) {
    for (const auto& c : n.children) {
        if (c.id == id) return c;
    }
    throw std::runtime_error("no child " + id);
}

// Edges found by scanning the formula text for declared identifiers.
std::set<std::pair<std::string, std::string>> scanned_edges(const ModelSpec& spec) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& f : spec.functions) {
        std::string text = pretty_expr(f.body);
        std::string word;
        for (std::size_t i = 0; i <= text.size(); ++i) {
            char c = i < text.size() ? text[i] : ' ';
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                word += c;
                continue;
            }
            if (!word.empty() && !std::isdigit(static_cast<unsigned char>(word[0])) && spec.kind_of(word)) {
                out.insert({word, f.id});
            }
            word.clear();
        }
    }
    return out;
}

} // namespace

TEST(Graph, TradingNodesAndRoots) {
    auto spec = load_model(testing_support::fixture("trading_pl.ssm"));
    auto g = build_graph(spec);
    EXPECT_EQ(g.nodes.size(), 14u);
    EXPECT_EQ(find_roots(g), std::vector<std::string>{"UnappropriatedProfitsCarriedToNextYear"});
    EXPECT_EQ(g.precedents_of("GrossProfit"),
              (std::vector<std::string>{"Sales", "CostOfGoodsSold", "ClosingStock"}));
    EXPECT_EQ(g.dependents_of("NetProfit"), std::vector<std::string>{"UnappropriatedProfitsCarriedToNextYear"});
    EXPECT_TRUE(detect_cycles(g).empty());
}

TEST(Graph, EdgesMatchTextScanOnGeneratedCorpus) {
    testing_support::ModelGenerator gen(11);
    for (int i = 0; i < 300; ++i) {
        auto spec = gen.next();
        auto g = build_graph(spec);
        std::set<std::pair<std::string, std::string>> edges;
        for (const auto& e : g.edges) {
            EXPECT_TRUE(edges.insert({e.precedent, e.dependent}).second) << "duplicate edge";
        }
        ASSERT_EQ(edges, scanned_edges(spec)) << format_model(spec);
    }
}

TEST(Graph, CyclesMatchBruteForce) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        DepGraph g;
        int n = std::uniform_int_distribution<int>(1, 6)(rng);
        std::map<std::string, std::set<std::string>> succ;
        for (int i = 0; i < n; ++i) {
            std::string id(1, static_cast<char>('A' + i));
            g.nodes.push_back({id, DeclKind::Function});
            succ[id];
        }
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (a != b && std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
                    std::string pa(1, static_cast<char>('A' + a)), pb(1, static_cast<char>('A' + b));
                    g.edges.push_back({pa, pb});
                    succ[pa].insert(pb);
                }
            }
        }
        auto found = detect_cycles(g);
        std::set<std::vector<std::string>> as_set(found.begin(), found.end());
        EXPECT_EQ(as_set.size(), found.size());
        ASSERT_EQ(as_set, testing_support::brute_force_cycles(succ));
    }
}

TEST(Graph, NoRoot) {
    DepGraph g;
    g.nodes = {{"A", DeclKind::Function}, {"B", DeclKind::Function}};
    g.edges = {{"A", "B"}, {"B", "A"}};
    try {
        find_roots(g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "NO_ROOT");
    }
}

TEST(Classify, Kinds) {
    auto spec = load_model(
        "model \"m\"\ninput X \"x\" = 1\ninput K \"k\" = 2 constant\nrange R \"r\" {\n \"a\" = 1\n}\n"
        "func F \"f\" = SELECT(X > 0, K; X <= 0, SUM(R))\nfunc G \"g\" = F + X\n");
    EXPECT_EQ(classify_node("X", spec), NodeKind::Leaf);
    EXPECT_EQ(classify_node("K", spec), NodeKind::Constant);
    EXPECT_EQ(classify_node("R", spec), NodeKind::Iteration);
    EXPECT_EQ(classify_node("F", spec), NodeKind::Selection);
    EXPECT_EQ(classify_node("G", spec), NodeKind::Function);
    EXPECT_THROW(classify_node("Z", spec), Error);
}

TEST(Forest, TradingIsASingleTree) {
    auto spec = load_model(testing_support::fixture("trading_pl.ssm"));
    auto forest = resolve_to_forest(build_graph(spec), spec);
    ASSERT_EQ(forest.modules.size(), 1u);
    const auto& root = forest.modules[0].root;
    EXPECT_EQ(ids_of(root), (std::vector<std::string>{"NetProfit", "UnappropriatedProfitsFromLastYear",
                                                      "TotalAppropriations"}));
    const auto& expenses = child(child(root, "NetProfit"), "TotalExpenses").children.at(0);
    EXPECT_EQ(expenses.kind, NodeKind::Iteration);
    EXPECT_EQ(expenses.depth, 3);
    EXPECT_EQ(resolve_to_forest(build_graph(spec), spec, ResolutionMode::Figure7Compat), forest);
}

TEST(Forest, SharedElementsStrict) {
    auto spec = shared();
    auto forest = resolve_to_forest(build_graph(spec), spec, ResolutionMode::Strict);
    ASSERT_EQ(forest.modules.size(), 3u);
    EXPECT_EQ(forest.modules[0].name, "A");
    EXPECT_EQ(forest.modules[1].name, "D");
    EXPECT_EQ(forest.modules[2].name, "G");
    const auto& a = forest.modules[0].root;
    EXPECT_EQ(child(child(a, "B"), "D").kind, NodeKind::ModuleRef);
    EXPECT_EQ(child(child(a, "C"), "G").kind, NodeKind::ModuleRef);
    EXPECT_EQ(child(child(forest.modules[1].root, "F"), "G").module, "G");
    EXPECT_EQ(forest.modules[2].root.children.at(0).kind, NodeKind::Iteration);
    EXPECT_EQ(testing_support::tree_property_problem(forest), "");
}

TEST(Forest, SharedElementsCompat) {
    auto spec = shared();
    auto forest = resolve_to_forest(build_graph(spec), spec, ResolutionMode::Figure7Compat);
    ASSERT_EQ(forest.modules.size(), 2u);
    EXPECT_EQ(format_tree(forest),
              "module A\nA\n  B\n    D →D\n  C\n    D →D\n    G\n      H*\n"
              "module D\nD\n  E\n  F\n    G\n      H*\n");
    EXPECT_EQ(testing_support::tree_property_problem(forest), "");
}

TEST(Forest, SharedInputsAreDuplicated) {
    auto spec = load_model("model \"m\"\ninput X \"x\" = 1\nfunc A \"a\" = B + C\n"
                           "func B \"b\" = X * 2\nfunc C \"c\" = X + 1\n");
    auto forest = resolve_to_forest(build_graph(spec), spec);
    ASSERT_EQ(forest.modules.size(), 1u);
    EXPECT_EQ(format_tree(forest), "module A\nA\n  B\n    X\n  C\n    X\n");
}

TEST(Forest, CycleIsReported) {
    auto spec = load_model(testing_support::fixture("cycle.ssm"));
    try {
        resolve_to_forest(build_graph(spec), spec);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "CYCLE");
        EXPECT_NE(std::string(e.what()).find("A -> B -> A"), std::string::npos) << e.what();
    }
}

TEST(Forest, GeneratedCorpusKeepsTreeProperty) {
    testing_support::ModelGenerator gen(5);
    for (int i = 0; i < 300; ++i) {
        auto spec = gen.next();
        for (auto mode : {ResolutionMode::Strict, ResolutionMode::Figure7Compat}) {
            auto forest = resolve_to_forest(build_graph(spec), spec, mode);
            ASSERT_EQ(testing_support::tree_property_problem(forest), "") << format_model(spec);
        }
    }
}
