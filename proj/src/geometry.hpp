#pragma once

#include "types.hpp"

#include <span>

namespace regfilt {

/// p -> s * R * p + t.
Vec3 apply_transform(const RigidTransform& t, const Vec3& p);

/// True when m is orthonormal with determinant +1 within `tol` elementwise.
bool is_rotation(const Mat3& m, double tol = 1e-9);

/// Nearest proper rotation in Frobenius norm: U * diag(1, 1, det(U V^T)) * V^T
/// from the SVD of m. The determinant correction rejects reflections.
/// Throws ErrorCode::degenerate when m is rank deficient
/// (smallest singular value < 1e-12 * largest).
Mat3 project_to_rotation(const Mat3& m);

/// Componentwise mean. Throws ErrorCode::empty_input on an empty span.
Vec3 centroid(std::span<const Vec3> points);

/// sqrt(mean of squared residuals) of T applied to the sources, in meters.
/// Throws ErrorCode::empty_input on an empty sequence.
double rmse(const RigidTransform& t, const Correspondences& corrs);

/// Row-major flattening between the 9-entry filter state and the 3x3 matrix.
Mat3 state_to_matrix(const Vec9& x);
Vec9 matrix_to_state(const Mat3& m);

}  // namespace regfilt
