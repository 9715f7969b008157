#pragma once

// Built-in invariant suites behind the `check` CLI subcommand. Each suite
// runs with fixed seeds and prints a pass/fail table; the return value is 0
// when every check passed, 1 otherwise, 2 for an unknown suite name.

#include <iosfwd>
#include <string>
#include <vector>

namespace dropgp {

std::vector<std::string> selfcheck_suites();
int run_selfcheck(const std::string& suite, std::ostream& os);

} // namespace dropgp
