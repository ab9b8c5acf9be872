#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lapmap::cli {

// Exit statuses. Failures also print one line `ERROR <code>: <message>` to the error stream.
enum ExitStatus : int {
  kOk = 0,
  kUsage = 2,
  kConfig = 3,
  kParse = 4,
  kInvariant = 5,
  kDomain = 6,
  kResource = 7,
  kUnsupported = 8,
  kIo = 9,
  kVerifyFailed = 10,
  kInternal = 70,
};

/// Runs `lapmap <command> ...`; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lapmap::cli
