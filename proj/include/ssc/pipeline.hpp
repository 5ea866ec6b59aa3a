#pragma once

#include <string_view>

#include "ssc/emitter.hpp"
#include "ssc/layout.hpp"
#include "ssc/parser.hpp"
#include "ssc/structurer.hpp"

namespace ssc {

struct CompileOptions {
    RefMode ref_mode = RefMode::Address;
    ResolutionMode resolution = ResolutionMode::Strict;
    LayoutConfig layout;
    EmitOptions emit;
};

/// Every intermediate product of one compilation.
struct Compilation {
    ModelSpec spec;
    DepGraph graph;
    StructureForest forest;
    WorkbookLayout layout;
    WorkbookGrid grid;
};

/// Structures, lays out and emits an already validated model.
inline Compilation compile_model(ModelSpec spec, const CompileOptions& options = {}) {
    Compilation c;
    c.spec = std::move(spec);
    c.graph = build_graph(c.spec);
    c.forest = resolve_to_forest(c.graph, c.spec, options.resolution);
    c.layout = layout_workbook(c.spec, c.forest, options.layout);
    c.grid = emit_workbook(c.spec, c.forest, c.layout, options.ref_mode, options.emit);
    return c;
}

inline Compilation compile_source(std::string_view source, const CompileOptions& options = {}) {
    return compile_model(load_model(source), options);
}

} // namespace ssc
