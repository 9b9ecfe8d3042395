#pragma once

#include <stdexcept>
#include <string>

namespace grnea::pipe {

/// A required persisted artifact is absent. The CLI maps this to exit 2,
/// plain validation problems to exit 1.
struct MissingArtifactError : std::runtime_error {
    explicit MissingArtifactError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace grnea::pipe
