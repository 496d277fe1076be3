#pragma once

#include <vector>

#include "echoloc/vec3.hpp"

namespace echoloc {

struct Pose {
    Vec3 position;
    Quat orientation;  // carried through to output; directions stay world-frame
};

// One direction-of-arrival estimate: the sound reached the listener
// travelling along `direction` (unit vector, world frame). Backward tracing
// therefore leaves the listener along -direction.
struct Observation {
    int frame = 0;
    Pose listener;
    Vec3 direction;
};

}  // namespace echoloc
