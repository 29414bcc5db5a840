#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ccm::cli {

enum Exit { kOk = 0, kViolation = 1, kInputError = 2 };

// Runs one command; args excludes the program name. Reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Resolves an input path: as given, then relative to the corpus directory, then as a corpus entry name.
std::string resolve_input(const std::string& path);

}  // namespace ccm::cli
