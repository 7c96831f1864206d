#pragma once

#include <string>
#include <vector>

#include "stencil_lab/config.hpp"

namespace stencil_lab {

/// Names of the built-in example problems, in a stable order.
std::vector<std::string> preset_names();

/// The full run configuration for a built-in example problem.
/// Throws ValidationError when the name is not one of preset_names().
RunConfig preset_config(const std::string& name);

} // namespace stencil_lab
