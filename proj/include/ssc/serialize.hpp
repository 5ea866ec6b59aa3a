#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ssc/grid.hpp"

namespace ssc {

namespace detail {

inline std::string json_string(const std::string& s) {
    return nlohmann::json(s).dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

inline const char* kind_name(CellKind k) {
    switch (k) {
    case CellKind::Label: return "label";
    case CellKind::Formula: return "formula";
    case CellKind::Number: return "number";
    case CellKind::Empty: return "empty";
    }
    return "empty";
}

} // namespace detail

/// Canonical grid-JSON: fixed key order, cells sorted by (row, col), names
/// sorted, decimals written with their exact scale. Byte-stable. `pretty`
/// puts each sheet, cell and name on its own indented line.
inline std::string serialize_grid_json(const WorkbookGrid& wb, bool pretty = false) {
    auto nl = [pretty](int depth) {
        return pretty ? "\n" + std::string(static_cast<std::size_t>(depth) * 2, ' ') : std::string();
    };
    const std::string colon = pretty ? ": " : ":";
    std::string out = "{" + nl(1) + "\"model\"" + colon + detail::json_string(wb.model);
    out += "," + nl(1) + "\"refMode\"" + colon + "\"";
    out += to_string(wb.ref_mode);
    out += "\"," + nl(1) + "\"sheets\"" + colon + "[";
    for (std::size_t s = 0; s < wb.sheets.size(); ++s) {
        const Sheet& sheet = wb.sheets[s];
        if (s > 0) {
            out += ",";
        }
        out += nl(2) + "{\"name\"" + colon + detail::json_string(sheet.name) + "," +
               (pretty ? " " : "") + "\"cells\"" + colon + "[";
        bool first = true;
        for (const auto& [pos, cell] : sheet.cells) {
            if (cell.kind == CellKind::Empty) {
                continue;
            }
            if (!first) {
                out += ",";
            }
            first = false;
            const std::string sep = pretty ? ", " : ",";
            out += nl(3) + "{\"row\"" + colon + std::to_string(pos.row) + sep + "\"col\"" + colon +
                   std::to_string(pos.col) + sep + "\"kind\"" + colon + "\"" +
                   detail::kind_name(cell.kind) + "\"";
            if (cell.kind == CellKind::Number) {
                out += sep + "\"value\"" + colon + cell.value.to_string();
            } else {
                out += sep + "\"text\"" + colon + detail::json_string(cell.text);
            }
            if (!cell.node.empty()) {
                out += sep + "\"node\"" + colon + detail::json_string(cell.node);
            }
            out += "}";
        }
        out += (first ? "" : nl(2)) + "]}";
    }
    out += (wb.sheets.empty() ? "" : nl(1)) + "]," + nl(1) + "\"names\"" + colon + "{";
    bool first = true;
    for (const auto& [name, target] : wb.names) {
        if (!first) {
            out += ",";
        }
        first = false;
        out += nl(2) + detail::json_string(name) + colon + detail::json_string(target.to_string());
    }
    out += (first ? "" : nl(1)) + "}" + nl(0) + "}";
    return out;
}

namespace detail {

// Marks number tokens kept as raw text so decimals never pass through double.
inline constexpr char kRawNumber = '\x01';

/// SAX consumer building a DOM where numbers are stored as their source text.
class RawNumberDom {
public:
    using json = nlohmann::json;

    bool null() { return put(json(nullptr)); }
    bool boolean(bool b) { return put(json(b)); }
    bool number_integer(json::number_integer_t v) { return put(json(kRawNumber + std::to_string(v))); }
    bool number_unsigned(json::number_unsigned_t v) { return put(json(kRawNumber + std::to_string(v))); }
    bool number_float(json::number_float_t, const std::string& raw) { return put(json(kRawNumber + raw)); }
    bool string(std::string& s) {
        if (!s.empty() && s.front() == kRawNumber) {
            return false;
        }
        return put(json(s));
    }
    bool binary(json::binary_t&) { return false; }
    bool start_object(std::size_t) {
        json* slot = put_slot(json::object());
        stack_.push_back(slot);
        return true;
    }
    bool key(std::string& k) {
        key_ = k;
        return true;
    }
    bool end_object() {
        stack_.pop_back();
        return true;
    }
    bool start_array(std::size_t) {
        json* slot = put_slot(json::array());
        stack_.push_back(slot);
        return true;
    }
    bool end_array() {
        stack_.pop_back();
        return true;
    }
    bool parse_error(std::size_t position, const std::string&, const nlohmann::detail::exception& ex) {
        throw Error("BAD_GRID_JSON", "grid-JSON syntax error at byte " + std::to_string(position) +
                                         ": " + ex.what());
    }

    json root;

private:
    json* put_slot(json value) {
        if (stack_.empty()) {
            root = std::move(value);
            return &root;
        }
        json& top = *stack_.back();
        if (top.is_array()) {
            top.push_back(std::move(value));
            return &top.back();
        }
        top[key_] = std::move(value);
        return &top[key_];
    }
    bool put(json value) {
        put_slot(std::move(value));
        return true;
    }

    std::vector<json*> stack_;
    std::string key_;
};

[[noreturn]] inline void bad_grid(const std::string& what) {
    throw Error("BAD_GRID_JSON", "malformed grid-JSON: " + what);
}

inline const nlohmann::json& field(const nlohmann::json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) {
        bad_grid(std::string("missing \"") + key + "\"");
    }
    return obj.at(key);
}

inline std::string string_field(const nlohmann::json& obj, const char* key) {
    const auto& v = field(obj, key);
    if (!v.is_string() || (!v.get_ref<const std::string&>().empty() &&
                           v.get_ref<const std::string&>().front() == kRawNumber)) {
        bad_grid(std::string("\"") + key + "\" must be a string");
    }
    return v.get<std::string>();
}

inline std::string number_field(const nlohmann::json& obj, const char* key) {
    const auto& v = field(obj, key);
    if (!v.is_string() || v.get_ref<const std::string&>().empty() ||
        v.get_ref<const std::string&>().front() != kRawNumber) {
        bad_grid(std::string("\"") + key + "\" must be a number");
    }
    return v.get<std::string>().substr(1);
}

inline int int_field(const nlohmann::json& obj, const char* key) {
    std::string raw = number_field(obj, key);
    try {
        std::size_t used = 0;
        int v = std::stoi(raw, &used);
        if (used != raw.size() || v < 1) {
            bad_grid(std::string("\"") + key + "\" must be a positive integer");
        }
        return v;
    } catch (const std::logic_error&) {
        bad_grid(std::string("\"") + key + "\" must be a positive integer");
    }
}

inline NameTarget parse_name_target(const std::string& text) {
    auto bang = text.find('!');
    if (bang == std::string::npos) {
        bad_grid("name target '" + text + "' lacks a sheet");
    }
    NameTarget t;
    t.sheet = text.substr(0, bang);
    std::string cells = text.substr(bang + 1);
    auto colon = cells.find(':');
    auto first = parse_a1(cells.substr(0, colon));
    if (!first) {
        bad_grid("bad name target '" + text + "'");
    }
    t.first = *first;
    t.last = *first;
    if (colon != std::string::npos) {
        auto last = parse_a1(cells.substr(colon + 1));
        if (!last) {
            bad_grid("bad name target '" + text + "'");
        }
        t.last = *last;
        t.is_range = true;
    }
    return t;
}

} // namespace detail

/// Inverse of serialize_grid_json. Throws BAD_GRID_JSON.
inline WorkbookGrid parse_grid_json(std::string_view text) {
    detail::RawNumberDom dom;
    if (!nlohmann::json::sax_parse(text, &dom)) {
        detail::bad_grid("unsupported value");
    }
    const auto& root = dom.root;
    WorkbookGrid wb;
    wb.model = detail::string_field(root, "model");
    std::string mode = detail::string_field(root, "refMode");
    if (mode == "Address") {
        wb.ref_mode = RefMode::Address;
    } else if (mode == "Name") {
        wb.ref_mode = RefMode::Name;
    } else {
        detail::bad_grid("refMode must be Address or Name");
    }
    const auto& sheets = detail::field(root, "sheets");
    if (!sheets.is_array()) {
        detail::bad_grid("\"sheets\" must be an array");
    }
    for (const auto& js : sheets) {
        Sheet sheet;
        sheet.name = detail::string_field(js, "name");
        const auto& cells = detail::field(js, "cells");
        if (!cells.is_array()) {
            detail::bad_grid("\"cells\" must be an array");
        }
        for (const auto& jc : cells) {
            GridPos pos{detail::int_field(jc, "row"), detail::int_field(jc, "col")};
            std::string kind = detail::string_field(jc, "kind");
            Cell cell;
            if (kind == "label") {
                cell = Cell::label(detail::string_field(jc, "text"));
            } else if (kind == "formula") {
                cell = Cell::formula(detail::string_field(jc, "text"));
            } else if (kind == "number") {
                try {
                    cell = Cell::number(Decimal::parse(detail::number_field(jc, "value")));
                } catch (const Error& e) {
                    if (e.code() == "BAD_GRID_JSON") {
                        throw;
                    }
                    detail::bad_grid(e.what());
                }
            } else {
                detail::bad_grid("unknown cell kind '" + kind + "'");
            }
            if (jc.contains("node")) {
                cell.node = detail::string_field(jc, "node");
            }
            if (!sheet.cells.emplace(pos, std::move(cell)).second) {
                detail::bad_grid("duplicate cell " + sheet.name + "!" + a1(pos));
            }
        }
        wb.sheets.push_back(std::move(sheet));
    }
    const auto& names = detail::field(root, "names");
    if (!names.is_object()) {
        detail::bad_grid("\"names\" must be an object");
    }
    for (const auto& [name, target] : names.items()) {
        if (!target.is_string()) {
            detail::bad_grid("name target must be a string");
        }
        wb.names[name] = detail::parse_name_target(target.get<std::string>());
    }
    return wb;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace detail

/// RFC-4180-style CSV of one sheet up to its last used row and column, LF
/// line endings. Throws UNKNOWN_SHEET.
inline std::string serialize_csv(const WorkbookGrid& wb, const std::string& sheet_name) {
    const Sheet* sheet = wb.find_sheet(sheet_name);
    if (!sheet) {
        throw Error("UNKNOWN_SHEET", "no sheet named '" + sheet_name + "'");
    }
    GridPos extent = sheet->extent();
    std::string out;
    for (int r = 1; r <= extent.row; ++r) {
        for (int c = 1; c <= extent.col; ++c) {
            if (c > 1) {
                out.push_back(',');
            }
            const Cell* cell = sheet->at({r, c});
            if (!cell) {
                continue;
            }
            switch (cell->kind) {
            case CellKind::Number: out += cell->value.to_string(); break;
            case CellKind::Label:
            case CellKind::Formula: out += detail::csv_field(cell->text); break;
            case CellKind::Empty: break;
            }
        }
        out.push_back('\n');
    }
    return out;
}

} // namespace ssc
