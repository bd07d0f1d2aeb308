#ifndef QZD_CLI_HPP
#define QZD_CLI_HPP

#include <ostream>

namespace qzd {

/// Exit codes: 0 success, 1 a physics precondition failed (or `check`
/// reported a failure), 2 usage or configuration error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qzd

#endif  // QZD_CLI_HPP
