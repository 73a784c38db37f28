#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dsp/pipeline.hpp"

namespace dsp {

struct BenchSuite {
    std::string name;
    std::string file;    // relative to the corpus directory
    std::string module;
    std::vector<std::string> inputs;  // name=value literals
};

struct BenchRow {
    std::string program;
    std::string engine;  // "vm" or "oracle"
    std::size_t solutions = 0;
    double mean_ms = 0.0;
    rt::EngineStats stats;  // engine counters; zeros for the oracle
};

// The committed benchmark programs with their standard inputs.
std::vector<BenchSuite> bench_suites(const std::string& which);

// Compiles each suite once, then times `trials` full drains per engine.
// Trials run sequentially; each drain uses a fresh engine. Solution counts
// must agree between engines, otherwise an error is reported.
std::vector<BenchRow> run_bench(const std::vector<BenchSuite>& suites,
                                const std::string& corpus_dir, int trials,
                                std::vector<std::string>& errors);

std::string format_bench_table(const std::vector<BenchRow>& rows);

std::vector<Value> parse_inputs(const ModuleDecl& decl,
                                const std::vector<std::string>& pairs);

}  // namespace dsp
