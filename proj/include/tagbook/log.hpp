#pragma once

#include <string_view>

namespace tagbook::log {

// Warnings go to stderr unless silenced (CLI --quiet, tests).
void set_quiet(bool quiet);
bool quiet();
void warn(std::string_view message);

} // namespace tagbook::log
