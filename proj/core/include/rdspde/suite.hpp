#pragma once

#include "rdspde/config.hpp"
#include "rdspde/report.hpp"

namespace rdspde {

/// Runs the selected checks, concurrently up to the configured worker
/// count. Check i of the registry always draws from the i-th block of the
/// stream space, so results depend only on the configuration and seed.
SuiteReport run_suite(const SuiteConfig& cfg);

}  // namespace rdspde
