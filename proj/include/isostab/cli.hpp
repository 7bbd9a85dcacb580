#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "isostab/report.hpp"

namespace isostab::cli {

inline constexpr const char* tool_version = "1.0.0";

/// Runs one command line (without the program name); returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Loads a set spec from inline JSON text or a file path.
Json read_spec(const std::string& text_or_path);

}  // namespace isostab::cli
