#pragma once

#include <string>
#include <vector>

#include "limspec/scenario.hpp"

namespace limspec {

/// Registry names in listing order.
const std::vector<std::string>& gallery_names();

/// One-line summary for `limspec list`.
std::string gallery_summary(const std::string& name);

/// Scenario document of a gallery entry. Throws ConfigError listing the
/// registry for an unknown name.
std::string gallery_source(const std::string& name);

Scenario gallery_scenario(const std::string& name);

}  // namespace limspec
