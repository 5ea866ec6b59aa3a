#include <gtest/gtest.h>

#include "ssc/pipeline.hpp"
#include "ssc/serialize.hpp"
#include "support/csv_import.hpp"
#include "support/files.hpp"
#include "support/generator.hpp"

using namespace ssc;

namespace {

WorkbookGrid small_grid() {
    WorkbookGrid wb;
    wb.model = "m \"quoted\"";
    wb.ref_mode = RefMode::Name;
    Sheet s{"Input", {}};
    s.cells[{1, 1}] = Cell::label("Rent, rates");
    s.cells[{1, 2}] = Cell::number(Decimal::parse("12345678901234.56"), "Rent");
    s.cells[{2, 1}] = Cell::label("Directors' \"fees\"");
    s.cells[{2, 3}] = Cell::formula("=SUM(B1:B1)");
    wb.sheets.push_back(s);
    wb.names["RentIn"] = NameTarget{"Input", {1, 2}, {1, 2}, false};
    wb.names["AllIn"] = NameTarget{"Input", {1, 2}, {4, 2}, true};
    return wb;
}

} // namespace

TEST(GridJson, CanonicalText) {
    EXPECT_EQ(serialize_grid_json(small_grid()),
              "{\"model\":\"m \\\"quoted\\\"\",\"refMode\":\"Name\",\"sheets\":[{\"name\":\"Input\",\"cells\":["
              "{\"row\":1,\"col\":1,\"kind\":\"label\",\"text\":\"Rent, rates\"},"
              "{\"row\":1,\"col\":2,\"kind\":\"number\",\"value\":12345678901234.56,\"node\":\"Rent\"},"
              "{\"row\":2,\"col\":1,\"kind\":\"label\",\"text\":\"Directors' \\\"fees\\\"\"},"
              "{\"row\":2,\"col\":3,\"kind\":\"formula\",\"text\":\"=SUM(B1:B1)\"}]}],"
              "\"names\":{\"AllIn\":\"Input!B1:B4\",\"RentIn\":\"Input!B1\"}}");
}

TEST(GridJson, RoundTripKeepsExactDecimals) {
    auto wb = small_grid();
    auto back = parse_grid_json(serialize_grid_json(wb));
    EXPECT_EQ(back, wb);
    EXPECT_EQ(back.find_sheet("Input")->at({1, 2})->value.to_string(), "12345678901234.56");
    EXPECT_EQ(parse_grid_json(serialize_grid_json(wb, true)), wb);
}

TEST(GridJson, RejectsMalformedInput) {
    for (const char* bad : {"", "{", "[]", "{\"model\":1}",
                            "{\"model\":\"m\",\"refMode\":\"Cells\",\"sheets\":[],\"names\":{}}",
                            "{\"model\":\"m\",\"refMode\":\"Name\",\"sheets\":[{\"name\":\"S\",\"cells\":"
                            "[{\"row\":0,\"col\":1,\"kind\":\"label\",\"text\":\"x\"}]}],\"names\":{}}",
                            "{\"model\":\"m\",\"refMode\":\"Name\",\"sheets\":[],\"names\":{\"N\":\"B5\"}}"}) {
        try {
            parse_grid_json(bad);
            ADD_FAILURE() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), "BAD_GRID_JSON") << bad;
        }
    }
}

TEST(Csv, QuotingAndShape) {
    std::string csv = serialize_csv(small_grid(), "Input");
    EXPECT_EQ(csv, "\"Rent, rates\",12345678901234.56,\n\"Directors' \"\"fees\"\"\",,=SUM(B1:B1)\n");
    EXPECT_THROW(serialize_csv(small_grid(), "Nope"), Error);
}

TEST(Csv, TradingWorkingsRow) {
    auto c = compile_source(testing_support::fixture("trading_pl.ssm"));
    auto rows = testing_support::read_csv(serialize_csv(c.grid, "Workings"));
    ASSERT_GE(rows.size(), 17u);
    EXPECT_EQ(rows[9], (std::vector<std::string>{"      Cost of goods sold", "", "", "", "=SUM(F11:F13)", ""}));
}

TEST(RoundTrip, GeneratedCorpus) {
    testing_support::ModelGenerator gen(17);
    for (int i = 0; i < 200; ++i) {
        auto spec = gen.next();
        for (auto mode : {RefMode::Address, RefMode::Name}) {
            CompileOptions o;
            o.ref_mode = mode;
            auto wb = compile_model(spec, o).grid;
            ASSERT_EQ(parse_grid_json(serialize_grid_json(wb)), wb);
            for (const auto& sheet : wb.sheets) {
                ASSERT_EQ(testing_support::import_csv(serialize_csv(wb, sheet.name)),
                          testing_support::without_nodes(sheet.cells))
                    << sheet.name;
            }
        }
    }
}
