#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace botw::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kNumericalFailure = 2;
inline constexpr int kChecksFailed = 3;

/// Entry point shared by the executable and the tests. args excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace botw::cli
