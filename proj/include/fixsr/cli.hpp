#pragma once

#include <iosfwd>

namespace fixsr {

/// Entry point for the `fixsr` tool. Returns 0 on success, 2 on usage errors
/// and 1 on configuration or I/O failures.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fixsr
