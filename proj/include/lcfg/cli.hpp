#pragma once

#include <iosfwd>
#include <map>
#include <string>

namespace lcfg::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kMissingInput = 2,
  kFormatError = 3,
  kDivergence = 4,
  kShapeError = 5,
};

using ConfigMap = std::map<std::string, std::string>;

/// Flat "key = value" text; '#' starts a comment. Throws FormatError naming the line's byte offset.
ConfigMap parse_config_text(const std::string& text);

/// Runs one command (argv[0] is the program name). Never throws; returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lcfg::cli
