#pragma once

#include <string>
#include <vector>

#include "dsp/pipeline.hpp"

namespace dsp {

struct EmittedFile {
    std::string name;
    std::string content;
};

// Source-to-source backend. Each module becomes one self-contained C++
// header defining an Executable class: one nested class per method, one
// per continuation unit (the first unit is merged into the method class).
// A generated support header carries factory declarations so mutually
// recursive modules need no include ordering. With `driver_module` set, a
// main.cpp is emitted that drains the module and prints one JSON record
// per solution, exactly as `run --format jsonl` does.
struct EmitResult {
    std::vector<EmittedFile> files;
    std::string manifest;  // JSON build manifest
};

EmitResult emit_program(const CompiledFile& cf, const std::string& driver_module = "");

}  // namespace dsp
