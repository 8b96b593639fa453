#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "bykov/flow.hpp"

namespace bykov {

inline constexpr std::string_view kVersion = "0.1.0";

/// Configuration of a flow run: the model plus an initial state and horizon.
struct FlowRun {
    ModelConfig model;
    State x0{-0.5, -0.139, -0.8807, 0.3013};
    double T = 500.0;
};

/// Keys: alpha1, alpha2, lambda, model, x0 (3 or 4 numbers), T.
/// Only alpha1 and alpha2 are required. Unknown keys throw ValidationError.
FlowRun flow_run_from_json(std::string_view json_text);

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string& path, std::string_view content);

/// Entry point of the command-line tool. Exit codes: 0 success,
/// 1 invariant violation under --verify, 2 usage or configuration error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bykov
