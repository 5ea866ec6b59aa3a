#include <gtest/gtest.h>

#include "ssc/layout.hpp"
#include "ssc/parser.hpp"
#include "support/files.hpp"
#include "support/generator.hpp"

using namespace ssc;

namespace {

WorkbookLayout trading_layout() {
    auto spec = load_model(testing_support::fixture("trading_pl.ssm"));
    auto forest = resolve_to_forest(build_graph(spec), spec);
    return layout_workbook(spec, forest);
}

std::string label_at(const SheetLayout& sheet, int row, int col) {
    auto it = sheet.cells.find({row, col});
    if (it == sheet.cells.end()) return "<none>";
    if (const auto* l = std::get_if<LabelPlan>(&it->second)) return l->text;
    return "<not a label>";
}

} // namespace

TEST(LayoutWorkings, TradingRowsAndColumns) {
    auto layout = trading_layout();
    const auto& slots = layout.workings.slots;
    std::vector<std::string> want_ids = {"UnappropriatedProfitsCarriedToNextYear", "NetProfit", "GrossProfit",
                                         "Sales", "CostOfGoodsSold", "OpeningStock", "Purchases",
                                         "CarriageInwards", "ClosingStock", "TotalExpenses",
                                         "UnappropriatedProfitsFromLastYear", "TotalAppropriations"};
    std::string want_cols = "BCDEEFFFEDCC";
    ASSERT_EQ(slots.size(), want_ids.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
        EXPECT_EQ(slots[i].node_id, want_ids[i]);
        EXPECT_EQ(slots[i].pos.row, static_cast<int>(6 + i));
        EXPECT_EQ(column_name(slots[i].pos.col), std::string(1, want_cols[i])) << want_ids[i];
    }
    EXPECT_EQ(label_at(layout.workings, 15, 1), "    Total expenses *");
    EXPECT_EQ(label_at(layout.workings, 17, 1), "  Less Total appropriations *");
    EXPECT_EQ(label_at(layout.workings, 8, 1), "    Gross Profit");
    for (int col = 2; col <= 6; ++col) {
        EXPECT_TRUE(std::holds_alternative<UnitHeader>(layout.workings.cells.at({5, col})));
    }
    EXPECT_EQ(slots[9].ranges, std::vector<std::string>{"Expenses"});
}

TEST(LayoutInput, TradingRows) {
    auto layout = trading_layout();
    const auto& in = layout.input;
    EXPECT_EQ(in.input_cells.at("Sales"), (GridPos{5, 2}));
    EXPECT_EQ(in.input_cells.at("OpeningStock"), (GridPos{6, 2}));
    EXPECT_EQ(in.input_cells.at("ClosingStock"), (GridPos{7, 2}));
    EXPECT_EQ(in.input_cells.at("Purchases"), (GridPos{8, 2}));
    EXPECT_EQ(in.input_cells.at("CarriageInwards"), (GridPos{9, 2}));
    EXPECT_EQ(in.input_cells.at("UnappropriatedProfitsFromLastYear"), (GridPos{23, 2}));
    EXPECT_EQ(label_at(in, 8, 1), "Purchases");
    EXPECT_EQ(label_at(in, 10, 1), "Expenses");
    auto [first, last] = range_extent(in, "Expenses");
    EXPECT_EQ(first.qualified() + ":" + last.local(), "Input!C11:C18");
    auto [af, al] = range_extent(in, "Appropriations");
    EXPECT_EQ(af.qualified() + ":" + al.local(), "Input!C20:C22");
    EXPECT_THROW(range_extent(in, "Nope"), Error);
}

TEST(LayoutOutput, TradingBlocks) {
    auto layout = trading_layout();
    const auto& out = layout.output;
    EXPECT_EQ(label_at(out, 1, 2), "Unappropriated profits carried to next year");
    EXPECT_EQ(label_at(out, 3, 2), "Net profit");
    EXPECT_EQ(label_at(out, 6, 2), "Unappropriated profits carried to next year");
    EXPECT_EQ(label_at(out, 9, 2), "Net profit");
    EXPECT_EQ(label_at(out, 11, 2), "Gross Profit");
    EXPECT_EQ(label_at(out, 13, 2), "Net profit");
    EXPECT_EQ(std::get<FormulaSlot>(out.cells.at({13, 3})).node_id, "NetProfit");
}

TEST(LayoutWorkings, ModulesGetTheirOwnHeader) {
    auto spec = load_model(testing_support::fixture("shared_elements.ssm"));
    auto forest = resolve_to_forest(build_graph(spec), spec);
    auto w = layout_workings(forest);
    ASSERT_EQ(w.module_roots.size(), 3u);
    EXPECT_EQ(w.slots[w.module_roots[0]].pos, (GridPos{6, 2}));
    int prev_last = w.slots[w.module_roots[1] - 1].pos.row;
    EXPECT_TRUE(std::holds_alternative<UnitHeader>(w.cells.at({prev_last + 2, 2})));
    EXPECT_EQ(w.slots[w.module_roots[1]].pos, (GridPos{prev_last + 3, 2}));
}

TEST(LayoutWorkings, DepthOverflow) {
    std::string text = "model \"deep\"\ninput X \"x\" = 1\n";
    for (int i = 0; i < 30; ++i) {
        std::string next = i == 29 ? "X" : "F" + std::to_string(i + 1);
        text += "func F" + std::to_string(i) + " \"f" + std::to_string(i) + "\" = " + next + " + 1\n";
    }
    auto spec = load_model(text);
    auto forest = resolve_to_forest(build_graph(spec), spec);
    try {
        layout_workings(forest);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "DEPTH_OVERFLOW");
    }
    LayoutConfig wide;
    wide.max_virtual_columns = 40;
    EXPECT_NO_THROW(layout_workings(forest, wide));
}

TEST(LayoutWorkings, ColumnsFollowParentChainOnGeneratedCorpus) {
    testing_support::ModelGenerator gen(13);
    for (int i = 0; i < 300; ++i) {
        auto spec = gen.next();
        auto forest = resolve_to_forest(build_graph(spec), spec);
        auto w = layout_workings(forest);
        std::set<int> rows;
        for (const auto& s : w.slots) {
            int depth = 0;
            for (auto p = s.parent; p; p = w.slots[*p].parent) ++depth;
            ASSERT_EQ(s.pos.col, 2 + depth);
            ASSERT_TRUE(rows.insert(s.pos.row).second) << "two slots on row " << s.pos.row;
            if (s.parent) {
                ASSERT_GT(s.pos.row, w.slots[*s.parent].pos.row);
            }
        }
    }
}
