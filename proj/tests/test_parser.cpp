#include <gtest/gtest.h>

#include "ssc/parser.hpp"
#include "support/files.hpp"
#include "support/generator.hpp"

using namespace ssc;

namespace {

ExprPtr ref(const char* t) { return make_ref(t); }
ExprPtr lit(const char* v) { return make_literal(Decimal::parse(v)); }
ExprPtr bin(BinaryOp op, ExprPtr a, ExprPtr b) { return make_binary(op, std::move(a), std::move(b)); }

SourceSpan span_of_failure(std::string_view text) {
    try {
        parse_model(text);
    } catch (const ParseError& e) {
        return e.span();
    }
    ADD_FAILURE() << "no parse error for: " << text;
    return {};
}

} // namespace

TEST(ParseExpr, LeftAssociativeWithPrecedence) {
    auto e = parse_expr("Sales-CostOfGoodsSold+ClosingStock");
    auto want = bin(BinaryOp::Add, bin(BinaryOp::Sub, ref("Sales"), ref("CostOfGoodsSold")),
                    ref("ClosingStock"));
    EXPECT_TRUE(expr_equal(e, want));

    auto p = parse_expr("a + b * c - d / 2");
    auto want_p = bin(BinaryOp::Sub, bin(BinaryOp::Add, ref("a"), bin(BinaryOp::Mul, ref("b"), ref("c"))),
                      bin(BinaryOp::Div, ref("d"), lit("2")));
    EXPECT_TRUE(expr_equal(p, want_p));
}

TEST(ParseExpr, SumArguments) {
    auto e = parse_expr("SUM(OpeningStock; Purchases; CarriageInwards)");
    const auto& agg = std::get<Aggregate>(e->node);
    ASSERT_EQ(agg.args.size(), 3u);
    EXPECT_EQ(arg_target(agg.args[1]), "Purchases");

    ExprParseOptions options;
    options.is_range = [](const std::string& id) { return id == "Expenses"; };
    auto s = parse_expr("SUM(Expenses; Bonus)", options);
    const auto& agg2 = std::get<Aggregate>(s->node);
    EXPECT_TRUE(arg_is_range(agg2.args[0]));
    EXPECT_FALSE(arg_is_range(agg2.args[1]));
}

TEST(ParseExpr, Select) {
    auto e = parse_expr("SELECT(Profit > 0, Profit * 0.2; Profit <= 0, 0)");
    const auto& sel = std::get<Select>(e->node);
    ASSERT_EQ(sel.options.size(), 2u);
    EXPECT_EQ(sel.options[0].guard.op, CompareOp::Gt);
    EXPECT_EQ(sel.options[1].guard.op, CompareOp::Le);
    EXPECT_EQ(pretty_expr(e), "SELECT(Profit>0, Profit*0.2; Profit<=0, 0)");
}

TEST(ParseExpr, GridReferences) {
    ExprParseOptions options;
    options.allow_cell_refs = true;
    auto e = parse_expr("Input!B5+SUM(F11:F13)+SUM(Input!C11:C18)", options);
    auto refs = refs_in_order(*e);
    ASSERT_EQ(refs.size(), 3u);
    EXPECT_EQ(refs[0].target, "Input!B5");
    EXPECT_FALSE(refs[0].is_range);
    EXPECT_EQ(refs[1].target, "F11:F13");
    EXPECT_TRUE(refs[1].is_range);
    EXPECT_EQ(refs[2].target, "Input!C11:C18");
    EXPECT_THROW(parse_expr("Input!B5"), ParseError);
    EXPECT_THROW(parse_expr("F11:F13+1", options), ParseError);
}

TEST(ParseExpr, ErrorSpans) {
    try {
        parse_expr("a + * b");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.span().column, 5);
    }
    try {
        parse_expr("a +");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.span().column, 3);
    }
    EXPECT_THROW(parse_expr(""), ParseError);
    EXPECT_THROW(parse_expr("1,000 + a"), ParseError);
    EXPECT_THROW(parse_expr("-a"), ParseError);
    EXPECT_THROW(parse_expr("AVG(a)"), ParseError);
}

TEST(PrettyExpr, MinimalParentheses) {
    EXPECT_EQ(pretty_expr(parse_expr("(a+b)+c")), "a+b+c");
    EXPECT_EQ(pretty_expr(parse_expr("a+(b+c)")), "a+(b+c)");
    EXPECT_EQ(pretty_expr(parse_expr("a-(b-c)")), "a-(b-c)");
    EXPECT_EQ(pretty_expr(parse_expr("(a+b)*c")), "(a+b)*c");
    EXPECT_EQ(pretty_expr(parse_expr("a*(b/c)")), "a*(b/c)");
    EXPECT_EQ(pretty_expr(parse_expr("a*-5")), "a*(-5)");
}

TEST(ParseModel, TradingFixture) {
    auto spec = load_model(testing_support::fixture("trading_pl.ssm"));
    EXPECT_EQ(spec.title, "Trading & P/L");
    EXPECT_EQ(spec.inputs.size(), 6u);
    EXPECT_EQ(spec.ranges.size(), 2u);
    EXPECT_EQ(spec.ranges[0].members.size(), 8u);
    EXPECT_EQ(spec.functions.size(), 6u);
    ASSERT_EQ(spec.outputs.size(), 2u);
    EXPECT_EQ(spec.outputs[0].rows.size(), 4u);
    EXPECT_TRUE(arg_is_range(std::get<Aggregate>(spec.find_function("TotalExpenses")->body->node).args[0]));
    EXPECT_FALSE(arg_is_range(std::get<Aggregate>(spec.find_function("CostOfGoodsSold")->body->node).args[0]));
}

TEST(ParseModel, SyntaxErrorsCarrySpans) {
    EXPECT_EQ(span_of_failure("").line, 1);
    auto s = span_of_failure("model \"m\"\ninput X \"x\" = 1,000\n");
    EXPECT_EQ(s.line, 2);
    EXPECT_EQ(s.column, 15);
    s = span_of_failure("model \"m\"\nfunc F \"f\" = a + \n");
    EXPECT_EQ(s.line, 2);
    s = span_of_failure("model \"m\"\nrange R \"r\" {\n  \"a\" = 1\n");
    EXPECT_EQ(s.line, 3);
    s = span_of_failure("model \"m\"\nwidget W\n");
    EXPECT_EQ(s.line, 2);
    EXPECT_EQ(s.column, 1);
    span_of_failure("model \"m\"\ninput X \"unterminated = 1\n");
    span_of_failure("model \"m\"\nfunc SUM \"s\" = 1\n");
}

TEST(ParseModel, CommentsAndLineEndings) {
    auto spec = parse_model("# heading\r\nmodel \"m # not a comment\" # trailing\r\ninput X \"x\" = 2 constant\r\n");
    EXPECT_EQ(spec.title, "m # not a comment");
    ASSERT_EQ(spec.inputs.size(), 1u);
    EXPECT_TRUE(spec.inputs[0].constant);
}

TEST(ParseModel, FormatRoundTripsOnFixtures) {
    for (const char* name : {"trading_pl.ssm", "shared_elements.ssm"}) {
        auto spec = parse_model(testing_support::fixture(name));
        EXPECT_EQ(parse_model(format_model(spec)), spec) << name;
    }
}

TEST(ParseModel, RoundTripsOnGeneratedCorpus) {
    testing_support::ModelGenerator gen(7);
    for (int i = 0; i < 300; ++i) {
        auto spec = gen.next();
        std::string text = format_model(spec);
        ASSERT_EQ(parse_model(text), spec) << text;
        for (const auto& f : spec.functions) {
            ExprParseOptions options;
            options.is_range = [&](const std::string& id) { return spec.find_range(id) != nullptr; };
            ASSERT_TRUE(expr_equal(parse_expr(pretty_expr(f.body), options), f.body)) << pretty_expr(f.body);
        }
    }
}
