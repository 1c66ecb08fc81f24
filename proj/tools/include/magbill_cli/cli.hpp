#pragma once

#include <magbill/errors.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace magbill::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;

/// 2 for input problems (bad config, inadmissible table, no construction),
/// 3 for numeric failures during a run.
int exit_code_for(ErrorCode code);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace magbill::cli
