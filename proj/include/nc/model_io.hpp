#pragma once

#include "nc/icnn.hpp"

#include <filesystem>
#include <optional>

namespace nc {

inline constexpr const char* kModelMagic = "NCICNN";
inline constexpr int kModelFormatVersion = 1;

// Text container, see docs/formats.md. Parameters are written in shortest
// round-trip decimal form, so save/load is lossless.
void save_model(const IcnnModel& model, const std::filesystem::path& path);

// ModelFormatError on bad magic, unknown version or truncation;
// HeaderMismatchError when expected_input_dimension is given and differs.
IcnnModel load_model(const std::filesystem::path& path,
                     std::optional<int> expected_input_dimension = std::nullopt);

}  // namespace nc
