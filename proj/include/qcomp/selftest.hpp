#pragma once

#include <iosfwd>

namespace qcomp {

/// Quick worked-example checks across all modules, one line per check.
/// Returns the number of failures.
int run_selftest(std::ostream& out);

}  // namespace qcomp
