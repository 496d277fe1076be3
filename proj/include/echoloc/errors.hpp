#pragma once

#include <stdexcept>
#include <string>

namespace echoloc {

// Malformed input text (OBJ, config, CSV). Messages carry the offending
// file/line so CLI users can fix the input without a debugger.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally invalid data that parsed fine (degenerate triangles,
// non-manifold edges, out-of-range parameters).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad run configuration (missing files, nonsensical parameter combos).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace echoloc
