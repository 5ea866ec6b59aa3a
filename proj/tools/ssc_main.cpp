#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssc/ssc.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kStructural = 2, kViolations = 3 };

bool color_enabled() {
    if (const char* env = std::getenv("SSC_COLOR")) {
        return std::string(env) == "1";
    }
    return isatty(fileno(stderr)) != 0;
}

void report(const std::string& kind, const std::string& text) {
    if (color_enabled()) {
        std::cerr << "\033[1;31m" << kind << ":\033[0m " << text << "\n";
    } else {
        std::cerr << kind << ": " << text << "\n";
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ssc::Error("IO_ERROR", "cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int exit_code_for(const std::string& code) {
    if (code == "CYCLE" || code == "NO_ROOT" || code == "DEPTH_OVERFLOW" ||
        code == "LAYOUT_OVERLAP") {
        return kStructural;
    }
    return kInvalid;
}

void print_diagnostics(const std::string& path, const std::vector<ssc::Diagnostic>& diags) {
    for (const auto& d : diags) {
        std::string where = path;
        if (d.location.span) {
            where += ":" + std::to_string(d.location.span->line) + ":" +
                     std::to_string(d.location.span->column);
        }
        report("error", where + ": " + d.code + ": " + d.message);
    }
}

struct Options {
    std::string input;
    std::string out;
    std::string ref_mode = "address";
    std::string resolution = "strict";
    std::string format = "grid-json";
    std::string audit_format = "text";
    int scale = 2;
    bool pretty = false;
    bool report = false;
};

ssc::CompileOptions compile_options(const Options& o) {
    ssc::CompileOptions c;
    c.ref_mode = o.ref_mode == "name" ? ssc::RefMode::Name : ssc::RefMode::Address;
    c.resolution =
        o.resolution == "figure7" ? ssc::ResolutionMode::Figure7Compat : ssc::ResolutionMode::Strict;
    c.emit.scale = o.scale;
    return c;
}

std::string grid_json_text(const ssc::WorkbookGrid& grid, bool pretty) {
    return ssc::serialize_grid_json(grid, pretty) + "\n";
}

// Writes every file to a temporary sibling first; renames only once all
// writes succeeded, and removes anything new on failure.
void write_all(const fs::path& out_dir, const std::vector<std::pair<fs::path, std::string>>& files) {
    std::vector<fs::path> created_dirs;
    std::vector<fs::path> temps;
    std::vector<fs::path> finals;
    auto cleanup = [&] {
        std::error_code ec;
        for (const auto& t : temps) {
            fs::remove(t, ec);
        }
        for (const auto& f : finals) {
            fs::remove(f, ec);
        }
        for (auto it = created_dirs.rbegin(); it != created_dirs.rend(); ++it) {
            fs::remove(*it, ec);
        }
    };
    try {
        for (const auto& [rel, content] : files) {
            fs::path target = out_dir / rel;
            std::vector<fs::path> missing;
            for (fs::path d = target.parent_path(); !d.empty() && !fs::exists(d);
                 d = d.parent_path()) {
                missing.push_back(d);
            }
            for (auto it = missing.rbegin(); it != missing.rend(); ++it) {
                fs::create_directory(*it);
                created_dirs.push_back(*it);
            }
            fs::path temp = target;
            temp += ".tmp";
            std::ofstream os(temp, std::ios::binary);
            temps.push_back(temp);
            os << content;
            os.close();
            if (!os) {
                throw ssc::Error("IO_ERROR", "cannot write " + target.string());
            }
        }
        for (std::size_t i = 0; i < files.size(); ++i) {
            fs::path target = out_dir / files[i].first;
            fs::rename(temps[i], target);
            finals.push_back(target);
        }
    } catch (const fs::filesystem_error& e) {
        cleanup();
        throw ssc::Error("IO_ERROR", e.what());
    } catch (...) {
        cleanup();
        throw;
    }
}

int run_compile(const Options& o) {
    auto c = ssc::compile_source(read_file(o.input), compile_options(o));
    std::string stem = fs::path(o.input).stem().string();
    std::vector<std::pair<fs::path, std::string>> files;
    if (o.format == "grid-json" || o.format == "both") {
        files.emplace_back(stem + ".grid.json", grid_json_text(c.grid, o.pretty));
    }
    if (o.format == "csv" || o.format == "both") {
        for (const char* sheet : {ssc::kInputSheet, ssc::kWorkingsSheet, ssc::kOutputSheet}) {
            files.emplace_back(fs::path(stem) / (std::string(sheet) + ".csv"),
                               ssc::serialize_csv(c.grid, sheet));
        }
    }
    write_all(o.out, files);
    std::cout << "compiled " << c.spec.title << ": " << c.forest.modules.size() << " modules, "
              << c.layout.workings.slots.size() << " workings rows, " << c.grid.names.size()
              << " names\n";
    for (const auto& [rel, content] : files) {
        std::cout << "  wrote " << (fs::path(o.out) / rel).string() << "\n";
    }
    return kOk;
}

int run_eval(const Options& o) {
    auto spec = ssc::load_model(read_file(o.input));
    if (!o.report) {
        auto values = ssc::evaluate_spec(spec, o.scale);
        for (const auto& [id, v] : values.values) {
            std::cout << id << " = " << v.to_string() << "\n";
        }
        return kOk;
    }
    auto options = compile_options(o);
    auto c = ssc::compile_model(spec, options);
    auto values = ssc::evaluate_spec(c.spec, o.scale);
    auto grid_values = ssc::evaluate_grid(c.grid, o.scale);
    const ssc::Sheet* workings = c.grid.find_sheet(ssc::kWorkingsSheet);
    std::size_t width = 0;
    for (const auto& s : c.layout.workings.slots) {
        width = std::max(width, s.label.size());
    }
    for (const auto& s : c.layout.workings.slots) {
        std::string value = values.values.at(s.node_id).to_display();
        std::cout << std::left << std::setw(static_cast<int>(width)) << s.label << "  "
                  << std::right << std::setw(5) << ssc::a1(s.pos) << "  " << std::setw(14) << value
                  << "  " << workings->at(s.pos)->text << "\n";
    }
    auto diffs = ssc::diff_values(values, grid_values);
    for (const auto& d : diffs) {
        report("error", "workbook value of " + d.id + " is " + d.b.to_string() + ", expected " +
                            d.a.to_string());
    }
    return diffs.empty() ? kOk : kStructural;
}

int run_tree(const Options& o) {
    auto spec = ssc::load_model(read_file(o.input));
    auto graph = ssc::build_graph(spec);
    std::cout << ssc::format_tree(
        ssc::resolve_to_forest(graph, spec, compile_options(o).resolution));
    return kOk;
}

int run_audit(const Options& o) {
    auto grid = ssc::parse_grid_json(read_file(o.input));
    auto violations = ssc::audit(grid);
    if (o.audit_format == "json") {
        nlohmann::ordered_json list = nlohmann::ordered_json::array();
        for (const auto& v : violations) {
            list.push_back({{"code", v.code},
                            {"address", v.address.qualified()},
                            {"message", v.message},
                            {"qualitative", v.qualitative}});
        }
        std::cout << list.dump(2) << "\n";
    } else {
        for (const auto& v : violations) {
            std::cout << v.address.qualified() << ": " << v.code << ": " << v.message << "\n";
        }
        if (violations.empty()) {
            std::cout << "no violations\n";
        }
    }
    return violations.empty() ? kOk : kViolations;
}

int run_check(const Options& o) {
    std::string source = read_file(o.input);
    auto spec = ssc::parse_model(source);
    auto diags = ssc::validate_model(spec);
    if (!diags.empty()) {
        print_diagnostics(o.input, diags);
        return kInvalid;
    }
    auto graph = ssc::build_graph(spec);
    auto cycles = ssc::detect_cycles(graph);
    for (const auto& cycle : cycles) {
        std::string text;
        for (const auto& id : cycle) {
            text += id + " -> ";
        }
        report("error", o.input + ": CYCLE: " + text + cycle.front());
    }
    if (!cycles.empty()) {
        return kStructural;
    }
    auto forest = ssc::resolve_to_forest(graph, spec, compile_options(o).resolution);
    ssc::layout_workbook(spec, forest);
    std::cout << o.input << ": ok (" << spec.inputs.size() << " inputs, " << spec.ranges.size()
              << " ranges, " << spec.functions.size() << " functions, " << forest.modules.size()
              << " modules)\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compiles spreadsheet model definitions into structured workbooks"};
    app.require_subcommand(1);
    Options o;

    auto add_input = [&](CLI::App* sub, const char* what) {
        sub->add_option("input", o.input, what)->required();
    };
    auto add_resolution = [&](CLI::App* sub) {
        sub->add_option("--resolution", o.resolution, "Shared-element resolution")
            ->check(CLI::IsMember({"strict", "figure7"}));
    };
    auto add_ref_mode = [&](CLI::App* sub) {
        sub->add_option("--ref-mode", o.ref_mode, "Reference style in formulas")
            ->check(CLI::IsMember({"address", "name"}));
    };
    auto add_scale = [&](CLI::App* sub) {
        sub->add_option("--scale", o.scale, "Decimal places")->check(CLI::Range(0, 12));
    };

    auto* compile = app.add_subcommand("compile", "Write the workbook for a model");
    add_input(compile, "Model file");
    compile->add_option("--out", o.out, "Output directory")->required();
    add_ref_mode(compile);
    add_resolution(compile);
    add_scale(compile);
    compile->add_option("--format", o.format, "Artifact format")
        ->check(CLI::IsMember({"grid-json", "csv", "both"}));
    compile->add_flag("--pretty", o.pretty, "Indent the grid JSON");

    auto* eval = app.add_subcommand("eval", "Print the value of every element");
    add_input(eval, "Model file");
    add_scale(eval);
    add_ref_mode(eval);
    add_resolution(eval);
    eval->add_flag("--report", o.report, "Tabulate Workings rows and cross-check the workbook");

    auto* tree = app.add_subcommand("tree", "Print the structure forest");
    add_input(tree, "Model file");
    add_resolution(tree);

    auto* audit = app.add_subcommand("audit", "Lint a grid-JSON workbook");
    add_input(audit, "Workbook file (.grid.json)");
    audit->add_option("--format", o.audit_format, "Report format")
        ->check(CLI::IsMember({"text", "json"}));

    auto* check = app.add_subcommand("check", "Validate a model and report diagnostics");
    add_input(check, "Model file");
    add_resolution(check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (*compile) return run_compile(o);
        if (*eval) return run_eval(o);
        if (*tree) return run_tree(o);
        if (*audit) return run_audit(o);
        return run_check(o);
    } catch (const ssc::ParseError& e) {
        report("error", o.input + ":" + std::to_string(e.span().line) + ":" +
                            std::to_string(e.span().column) + ": " + e.what());
        return kInvalid;
    } catch (const ssc::ModelError& e) {
        print_diagnostics(o.input, e.diagnostics());
        return kInvalid;
    } catch (const ssc::Error& e) {
        report("error", o.input + ": " + e.code() + ": " + e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        report("error", e.what());
        return kInvalid;
    }
}
