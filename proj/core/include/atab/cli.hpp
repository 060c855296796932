#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace atab {

/// Entry point of the atab command-line tool, with injectable streams so
/// tests can drive it in-process. args excludes the program name.
/// Exit codes: 0 on success (including SAFE and zero-disagreement runs),
/// 1 on an UNSAFE verdict or an oracle disagreement, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace atab
