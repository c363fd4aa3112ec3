#pragma once

#include <string>

namespace mfsi {

// Recomputes the qualitative behavior of the four presets and compares it
// with the narrative expectation each one encodes. Stable text, always the
// same bytes for the same build.
std::string check_report();

} // namespace mfsi
