#ifndef TROPGW_CLI_HPP
#define TROPGW_CLI_HPP

// Command-line front end: fan operations, moduli queries, degree helpers,
// invariant computation and verification suites. Exit codes: 0 success,
// 1 failed checks or internal errors, 2 parse errors, 3 rejected
// preconditions (the violated condition labels are printed).

#include <iosfwd>
#include <string>
#include <vector>

namespace tropgw::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tropgw::cli

#endif
