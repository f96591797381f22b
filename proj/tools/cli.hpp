#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ofdmsync::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 invalid configuration or arguments.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ofdmsync::cli
