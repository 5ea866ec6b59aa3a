#pragma once

#include <cctype>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ssc/expr.hpp"
#include "ssc/model.hpp"

namespace ssc {

class ParseError : public Error {
public:
    ParseError(const std::string& message, SourceSpan span)
        : Error("PARSE_ERROR", message), span_(span) {}

    const SourceSpan& span() const noexcept { return span_; }

private:
    SourceSpan span_;
};

struct ExprParseOptions {
    /// Accept grid references: "Input!B5", "F11:F13", "Input!C11:C18".
    bool allow_cell_refs = false;
    /// Decides whether a bare identifier inside SUM names a range. When
    /// unset every bare SUM argument is read as a range.
    std::function<bool(const std::string&)> is_range;
};

namespace detail {

inline bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

inline bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

/// Recursive-descent formula parser over a single line of text. `line` and
/// `column` locate the first character for error spans.
class ExprParser {
public:
    ExprParser(std::string_view text, const ExprParseOptions& options, int line, int column)
        : text_(text), options_(options), line_(line), column_(column) {}

    ExprPtr parse_all() {
        skip_ws();
        if (eof()) {
            fail_at_end("expected expression");
        }
        ExprPtr e = parse_sum();
        skip_ws();
        if (!eof()) {
            fail("unexpected '" + std::string(1, text_[pos_]) + "', expected operator or end of formula",
                 pos_, 1);
        }
        return e;
    }

private:
    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return eof() ? '\0' : text_[pos_]; }

    void skip_ws() {
        while (!eof() && (text_[pos_] == ' ' || text_[pos_] == '\t')) {
            ++pos_;
        }
    }

    [[noreturn]] void fail(const std::string& message, std::size_t at, std::size_t length) const {
        if (text_.empty()) {
            throw ParseError(message, {line_, column_, 1});
        }
        if (at >= text_.size()) {
            at = text_.size() - 1;
            length = 1;
        }
        length = std::max<std::size_t>(1, std::min(length, text_.size() - at));
        throw ParseError(message, {line_, column_ + static_cast<int>(at), static_cast<int>(length)});
    }

    [[noreturn]] void fail_at_end(const std::string& message) const {
        fail(message, text_.size(), 1);
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c) {
            if (eof()) {
                fail_at_end(std::string("expected '") + c + "'");
            }
            fail(std::string("expected '") + c + "'", pos_, 1);
        }
        ++pos_;
    }

    ExprPtr parse_sum() {
        ExprPtr lhs = parse_product();
        for (;;) {
            skip_ws();
            char c = peek();
            if (c != '+' && c != '-') {
                return lhs;
            }
            ++pos_;
            ExprPtr rhs = parse_product();
            lhs = make_binary(c == '+' ? BinaryOp::Add : BinaryOp::Sub, lhs, rhs);
        }
    }

    ExprPtr parse_product() {
        ExprPtr lhs = parse_factor();
        for (;;) {
            skip_ws();
            char c = peek();
            if (c != '*' && c != '/') {
                return lhs;
            }
            ++pos_;
            ExprPtr rhs = parse_factor();
            lhs = make_binary(c == '*' ? BinaryOp::Mul : BinaryOp::Div, lhs, rhs);
        }
    }

    Decimal parse_number(bool negative) {
        std::size_t start = pos_;
        while (!eof() && is_digit(peek())) {
            ++pos_;
        }
        if (peek() == '.') {
            ++pos_;
            std::size_t frac = pos_;
            while (!eof() && is_digit(peek())) {
                ++pos_;
            }
            if (pos_ == frac) {
                fail("expected digits after '.'", start, pos_ - start);
            }
        }
        if (peek() == ',' && pos_ + 1 < text_.size() && is_digit(text_[pos_ + 1])) {
            fail("thousands separators are not allowed in numbers", pos_, 1);
        }
        std::string text(text_.substr(start, pos_ - start));
        try {
            return Decimal::parse(negative ? "-" + text : text);
        } catch (const Error& e) {
            fail(e.what(), start, pos_ - start);
        }
    }

    std::string parse_identifier() {
        std::size_t start = pos_;
        while (!eof() && is_ident_char(peek())) {
            ++pos_;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    // ident | Sheet!ident | a:b | Sheet!a:b (the last three only for grids)
    struct Reference {
        std::string text;
        bool is_extent = false;
        std::size_t start = 0;
    };

    Reference parse_reference() {
        skip_ws();
        Reference r;
        r.start = pos_;
        if (!is_ident_start(peek())) {
            if (eof()) {
                fail_at_end("expected reference");
            }
            fail("expected reference", pos_, 1);
        }
        r.text = parse_identifier();
        if (!options_.allow_cell_refs) {
            return r;
        }
        if (peek() == '!') {
            ++pos_;
            if (!is_ident_start(peek())) {
                fail("expected cell after '!'", pos_, 1);
            }
            r.text += "!" + parse_identifier();
        }
        if (peek() == ':') {
            ++pos_;
            if (!is_ident_start(peek())) {
                fail("expected cell after ':'", pos_, 1);
            }
            r.text += ":" + parse_identifier();
            r.is_extent = true;
        }
        return r;
    }

    AggregateArg parse_aggregate_arg() {
        Reference r = parse_reference();
        bool range = r.is_extent;
        if (!range) {
            range = options_.is_range ? options_.is_range(r.text) : true;
        }
        if (range) {
            return RangeRef{r.text};
        }
        return Ref{r.text};
    }

    ExprPtr parse_aggregate() {
        expect('(');
        std::vector<AggregateArg> args;
        args.push_back(parse_aggregate_arg());
        for (;;) {
            skip_ws();
            if (peek() == ';') {
                ++pos_;
                args.push_back(parse_aggregate_arg());
                continue;
            }
            expect(')');
            return make_sum(std::move(args));
        }
    }

    CompareOp parse_compare_op() {
        skip_ws();
        char c = peek();
        char n = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
        if (c == '<' && n == '=') { pos_ += 2; return CompareOp::Le; }
        if (c == '>' && n == '=') { pos_ += 2; return CompareOp::Ge; }
        if (c == '<' && n == '>') { pos_ += 2; return CompareOp::Ne; }
        if (c == '<') { ++pos_; return CompareOp::Lt; }
        if (c == '>') { ++pos_; return CompareOp::Gt; }
        if (c == '=') { ++pos_; return CompareOp::Eq; }
        if (eof()) {
            fail_at_end("expected comparison operator");
        }
        fail("expected comparison operator", pos_, 1);
    }

    ExprPtr parse_select() {
        expect('(');
        std::vector<SelectOption> options;
        for (;;) {
            ExprPtr lhs = parse_sum();
            CompareOp op = parse_compare_op();
            ExprPtr rhs = parse_sum();
            expect(',');
            ExprPtr value = parse_sum();
            options.push_back({Guard{op, lhs, rhs}, value});
            skip_ws();
            if (peek() == ';') {
                ++pos_;
                continue;
            }
            expect(')');
            return make_select(std::move(options));
        }
    }

    ExprPtr parse_factor() {
        skip_ws();
        if (eof()) {
            fail_at_end("expected expression");
        }
        char c = peek();
        if (c == '-') {
            std::size_t at = pos_;
            ++pos_;
            if (!is_digit(peek())) {
                fail("expected number after unary '-'", at, 1);
            }
            return make_literal(parse_number(true));
        }
        if (is_digit(c)) {
            return make_literal(parse_number(false));
        }
        if (c == '(') {
            ++pos_;
            ExprPtr inner = parse_sum();
            expect(')');
            return inner;
        }
        if (is_ident_start(c)) {
            std::size_t save = pos_;
            std::string word = parse_identifier();
            skip_ws();
            if (peek() == '(' && word == "SUM") {
                return parse_aggregate();
            }
            if (peek() == '(' && word == "SELECT") {
                return parse_select();
            }
            if (peek() == '(') {
                fail("unknown function '" + word + "'", save, word.size());
            }
            pos_ = save;
            Reference r = parse_reference();
            if (r.is_extent) {
                fail("a cell range may only appear inside SUM", r.start, pos_ - r.start);
            }
            return make_ref(r.text);
        }
        fail("unexpected '" + std::string(1, c) + "', expected expression", pos_, 1);
    }

    std::string_view text_;
    const ExprParseOptions& options_;
    int line_;
    int column_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses formula text (without a leading '='). ×,÷ bind tighter than +,−;
/// all binary operators are left-associative.
inline ExprPtr parse_expr(std::string_view source, const ExprParseOptions& options = {}) {
    return detail::ExprParser(source, options, 1, 1).parse_all();
}

namespace detail {

struct DslToken {
    enum Kind { Ident, String, Number, Symbol, End } kind = End;
    std::string text;
    std::size_t column = 0; // 0-based within the line
    std::size_t length = 0;
};

struct DslLine {
    std::string_view text; // comment stripped
    int number = 1;
};

inline std::vector<DslLine> split_lines(std::string_view source) {
    std::vector<DslLine> lines;
    int number = 1;
    std::size_t start = 0;
    while (start <= source.size()) {
        std::size_t end = source.find('\n', start);
        if (end == std::string_view::npos) {
            end = source.size();
        }
        std::string_view line = source.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        // Strip comments outside string literals.
        bool in_string = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            char c = line[i];
            if (in_string && c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = !in_string;
            } else if (c == '#' && !in_string) {
                line = line.substr(0, i);
                break;
            }
        }
        lines.push_back({line, number++});
        if (end == source.size()) {
            break;
        }
        start = end + 1;
    }
    return lines;
}

class DslParser {
public:
    explicit DslParser(std::string_view source) : source_(source), lines_(split_lines(source)) {}

    ModelSpec parse() {
        ModelSpec spec;
        bool have_model = false;
        while (next_line()) {
            DslToken kw = next();
            if (kw.kind == DslToken::End) {
                continue;
            }
            if (!have_model) {
                if (kw.kind != DslToken::Ident || kw.text != "model") {
                    fail("expected 'model'", kw);
                }
                spec.title = expect_string("model title");
                expect_end();
                have_model = true;
                continue;
            }
            if (kw.kind == DslToken::Ident && kw.text == "input") {
                parse_input(spec, kw);
            } else if (kw.kind == DslToken::Ident && kw.text == "range") {
                parse_range(spec, kw);
            } else if (kw.kind == DslToken::Ident && kw.text == "func") {
                parse_function_header(spec, kw);
            } else if (kw.kind == DslToken::Ident && kw.text == "output") {
                parse_output(spec, kw);
            } else if (kw.kind == DslToken::Ident && kw.text == "model") {
                fail("duplicate 'model' declaration", kw);
            } else {
                fail("expected 'input', 'range', 'func' or 'output'", kw);
            }
        }
        if (!have_model) {
            fail_at_end("expected 'model'");
        }

        std::set<std::string> range_ids;
        for (const auto& r : spec.ranges) {
            range_ids.insert(r.id);
        }
        ExprParseOptions options;
        options.is_range = [&range_ids](const std::string& id) { return range_ids.count(id) > 0; };
        for (std::size_t i = 0; i < spec.functions.size(); ++i) {
            const PendingBody& body = bodies_[i];
            spec.functions[i].body =
                ExprParser(body.text, options, body.line, body.column).parse_all();
        }
        return spec;
    }

private:
    struct PendingBody {
        std::string_view text;
        int line;
        int column;
    };

    bool next_line() {
        if (line_index_ >= lines_.size()) {
            return false;
        }
        current_ = lines_[line_index_++];
        pos_ = 0;
        return true;
    }

    SourceSpan span_of(const DslToken& t) const {
        if (t.kind == DslToken::End) {
            return end_of_line_span();
        }
        return {current_.number, static_cast<int>(t.column) + 1, static_cast<int>(std::max<std::size_t>(1, t.length))};
    }

    // Last character on the current line, falling back to the source end.
    SourceSpan end_of_line_span() const {
        if (!current_.text.empty()) {
            return {current_.number, static_cast<int>(current_.text.size()), 1};
        }
        return last_char_span();
    }

    SourceSpan last_char_span() const {
        int line = 1;
        int column = 0;
        SourceSpan last{1, 1, 1};
        for (char c : source_) {
            if (c == '\n') {
                ++line;
                column = 0;
                continue;
            }
            ++column;
            if (c != '\r') {
                last = {line, column, 1};
            }
        }
        return last;
    }

    [[noreturn]] void fail(const std::string& message, const DslToken& t) const {
        throw ParseError(message, span_of(t));
    }

    [[noreturn]] void fail_at_end(const std::string& message) const {
        throw ParseError(message, last_char_span());
    }

    DslToken next() {
        std::string_view s = current_.text;
        while (pos_ < s.size() && (s[pos_] == ' ' || s[pos_] == '\t')) {
            ++pos_;
        }
        DslToken t;
        t.column = pos_;
        if (pos_ >= s.size()) {
            t.kind = DslToken::End;
            return t;
        }
        char c = s[pos_];
        if (is_ident_start(c)) {
            std::size_t start = pos_;
            while (pos_ < s.size() && is_ident_char(s[pos_])) {
                ++pos_;
            }
            t.kind = DslToken::Ident;
            t.text = std::string(s.substr(start, pos_ - start));
        } else if (c == '"') {
            std::size_t start = pos_++;
            std::string value;
            bool closed = false;
            while (pos_ < s.size()) {
                char d = s[pos_++];
                if (d == '\\' && pos_ < s.size()) {
                    value.push_back(s[pos_++]);
                } else if (d == '"') {
                    closed = true;
                    break;
                } else {
                    value.push_back(d);
                }
            }
            if (!closed) {
                throw ParseError("unterminated string",
                                 {current_.number, static_cast<int>(start) + 1,
                                  static_cast<int>(pos_ - start)});
            }
            t.kind = DslToken::String;
            t.text = std::move(value);
        } else if (is_digit(c) || (c == '-' && pos_ + 1 < s.size() && is_digit(s[pos_ + 1]))) {
            std::size_t start = pos_++;
            while (pos_ < s.size() && (is_digit(s[pos_]) || s[pos_] == '.' || s[pos_] == ',')) {
                ++pos_;
            }
            t.kind = DslToken::Number;
            t.text = std::string(s.substr(start, pos_ - start));
        } else if (c == '-' && pos_ + 1 < s.size() && s[pos_ + 1] == '>') {
            pos_ += 2;
            t.kind = DslToken::Symbol;
            t.text = "->";
        } else {
            ++pos_;
            t.kind = DslToken::Symbol;
            t.text = std::string(1, c);
        }
        t.length = pos_ - t.column;
        return t;
    }

    std::string expect_ident(const std::string& what) {
        DslToken t = next();
        if (t.kind != DslToken::Ident) {
            fail("expected " + what, t);
        }
        if (t.text == "SUM" || t.text == "SELECT") {
            fail("'" + t.text + "' is a reserved word", t);
        }
        return t.text;
    }

    std::string expect_string(const std::string& what) {
        DslToken t = next();
        if (t.kind != DslToken::String) {
            fail("expected " + what + " string", t);
        }
        return t.text;
    }

    void expect_symbol(const std::string& symbol) {
        DslToken t = next();
        if (t.kind != DslToken::Symbol || t.text != symbol) {
            fail("expected '" + symbol + "'", t);
        }
    }

    Decimal expect_decimal() {
        DslToken t = next();
        if (t.kind != DslToken::Number) {
            fail("expected decimal value", t);
        }
        if (t.text.find(',') != std::string::npos) {
            fail("thousands separators are not allowed in numbers", t);
        }
        try {
            return Decimal::parse(t.text);
        } catch (const Error& e) {
            fail(e.what(), t);
        }
    }

    void expect_end() {
        DslToken t = next();
        if (t.kind != DslToken::End) {
            fail("unexpected '" + t.text + "' at end of line", t);
        }
    }

    void parse_input(ModelSpec& spec, const DslToken& kw) {
        InputItem item;
        item.span = span_of(kw);
        item.id = expect_ident("input identifier");
        item.label = expect_string("input label");
        expect_symbol("=");
        item.value = expect_decimal();
        DslToken t = next();
        if (t.kind == DslToken::Ident && t.text == "constant") {
            item.constant = true;
            expect_end();
        } else if (t.kind != DslToken::End) {
            fail("expected 'constant' or end of line", t);
        }
        spec.add_input(std::move(item));
    }

    // Consumes lines up to the closing '}', calling `row` for each non-blank
    // line with the cursor at its first token.
    template <typename RowFn>
    void parse_block(const char* what, RowFn row) {
        for (;;) {
            if (!next_line()) {
                fail_at_end(std::string("expected '}' to close ") + what);
            }
            std::size_t save = pos_;
            DslToken t = next();
            if (t.kind == DslToken::End) {
                continue;
            }
            if (t.kind == DslToken::Symbol && t.text == "}") {
                expect_end();
                return;
            }
            pos_ = save;
            row();
        }
    }

    void parse_range(ModelSpec& spec, const DslToken& kw) {
        InputRange range;
        range.span = span_of(kw);
        range.id = expect_ident("range identifier");
        range.label = expect_string("range label");
        expect_symbol("{");
        expect_end();
        parse_block("range", [&] {
            RangeMember m;
            m.label = expect_string("member label");
            expect_symbol("=");
            m.value = expect_decimal();
            expect_end();
            range.members.push_back(std::move(m));
        });
        spec.add_range(std::move(range));
    }

    void parse_function_header(ModelSpec& spec, const DslToken& kw) {
        FunctionDef f;
        f.span = span_of(kw);
        f.id = expect_ident("function identifier");
        f.label = expect_string("function label");
        expect_symbol("=");
        std::string_view rest = current_.text.substr(pos_);
        if (rest.find_first_not_of(" \t") == std::string_view::npos) {
            fail("expected expression", DslToken{});
        }
        bodies_.push_back({rest, current_.number, static_cast<int>(pos_) + 1});
        spec.functions.push_back(std::move(f));
    }

    void parse_output(ModelSpec& spec, const DslToken& kw) {
        OutputBlock block;
        block.span = span_of(kw);
        block.title = expect_string("output title");
        expect_symbol("{");
        expect_end();
        parse_block("output", [&] {
            OutputRow r;
            DslToken first = next();
            if (first.kind != DslToken::String) {
                fail("expected row label string", first);
            }
            r.span = span_of(first);
            r.label = first.text;
            expect_symbol("->");
            r.ref = expect_ident("function identifier");
            expect_end();
            block.rows.push_back(std::move(r));
        });
        spec.outputs.push_back(std::move(block));
    }

    std::string_view source_;
    std::vector<DslLine> lines_;
    std::size_t line_index_ = 0;
    DslLine current_;
    std::size_t pos_ = 0;
    std::vector<PendingBody> bodies_;
};

inline std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out.push_back('\\');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace detail

/// Parses `.ssm` model text. Throws ParseError on syntax errors; semantic
/// problems are left for validate_model.
inline ModelSpec parse_model(std::string_view source) { return detail::DslParser(source).parse(); }

/// parse_model followed by validate_model; throws ModelError on diagnostics.
inline ModelSpec load_model(std::string_view source) {
    ModelSpec spec = parse_model(source);
    auto diagnostics = validate_model(spec);
    if (!diagnostics.empty()) {
        throw ModelError(std::move(diagnostics));
    }
    return spec;
}

/// Serializes a model back to `.ssm` text. parse_model(format_model(m)) == m.
inline std::string format_model(const ModelSpec& spec) {
    std::string out = "model " + detail::quote(spec.title) + "\n";
    if (!spec.input_order.empty()) {
        out += "\n";
    }
    for (const auto& entry : spec.input_order) {
        if (entry.kind == InputKind::Scalar) {
            const auto& i = spec.inputs[entry.index];
            out += "input " + i.id + " " + detail::quote(i.label) + " = " + i.value.to_string();
            out += i.constant ? " constant\n" : "\n";
        } else {
            const auto& r = spec.ranges[entry.index];
            out += "range " + r.id + " " + detail::quote(r.label) + " {\n";
            for (const auto& m : r.members) {
                out += "  " + detail::quote(m.label) + " = " + m.value.to_string() + "\n";
            }
            out += "}\n";
        }
    }
    if (!spec.functions.empty()) {
        out += "\n";
    }
    for (const auto& f : spec.functions) {
        out += "func " + f.id + " " + detail::quote(f.label) + " = " + pretty_expr(*f.body) + "\n";
    }
    for (const auto& b : spec.outputs) {
        out += "\noutput " + detail::quote(b.title) + " {\n";
        for (const auto& r : b.rows) {
            out += "  " + detail::quote(r.label) + " -> " + r.ref + "\n";
        }
        out += "}\n";
    }
    return out;
}

} // namespace ssc
