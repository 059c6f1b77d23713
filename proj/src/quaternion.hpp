#pragma once

#include "types.hpp"

namespace regfilt {

// Internal quaternion helpers; quaternions are not part of the public
// surface, rotations travel as 3x3 matrices.

/// Rotation matrix for the unit quaternion (w, x, y, z).
inline Mat3 quaternion_to_rotation(double w, double x, double y, double z) {
  Mat3 r;
  r << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
       2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
       2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y);
  return r;
}

}  // namespace regfilt
