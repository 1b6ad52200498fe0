#pragma once

// nlohmann/json is vendored as a single header; pulling the full header into
// every translation unit is acceptable here and keeps usage uniform.
#include <json.hpp>
