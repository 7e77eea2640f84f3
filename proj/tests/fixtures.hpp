#pragma once

// Shared fixture matrices for the test suites: the 4-node and 5-node trek
// drift matrices and their Lyapunov solutions.

#include "schurlim/matrix.hpp"

namespace fixtures {

inline schurlim::Matrix m4() {
    return schurlim::Matrix::from_rows(
        {{-1, 1, 0, 0}, {0, -1, 0, 0}, {0, 1, -1, 0}, {0, 0, 1, -1}});
}

inline schurlim::Matrix sigma4() {
    return schurlim::Matrix::from_rows({{1.5, 0.5, 0.5, 0.375},
                                        {0.5, 1.0, 0.5, 0.25},
                                        {0.5, 0.5, 1.5, 0.875},
                                        {0.375, 0.25, 0.875, 1.875}});
}

inline schurlim::Matrix m5(double m) {
    return schurlim::Matrix::from_rows({{-1, 1, 0, 0, 0},
                                        {0, -1, 0, 0, 0},
                                        {0, 1, -1, 0, 0},
                                        {0, 0, m, -m, 0},
                                        {0, 0, 0, 1, -1}});
}

/// Singular limit Sigma_5 = U Sigma_4 U^T with U duplicating coordinate 3.
inline schurlim::Matrix sigma5() {
    const auto s4 = sigma4();
    schurlim::Matrix u(5, 4);
    u(0, 0) = u(1, 1) = u(2, 2) = u(3, 2) = u(4, 3) = 1.0;
    return u * s4 * u.transpose();
}

/// Rank factor of (Sigma_5)_{234,234} over (Sigma_4)_{23,23}.
inline schurlim::Matrix u234() {
    return schurlim::Matrix::from_rows({{1, 0}, {0, 1}, {0, 1}});
}

/// First-order coefficient block (Sigma^(1,inf)_5)_{234,234} of the 5-node
/// Lyapunov family, derived from the family itself: the (2,4) entry of
/// Sigma^(m) is m/(2(m+1)) = 1/2 - 1/(2m) + O(1/m^2).
inline schurlim::Matrix g234() {
    return schurlim::Matrix::from_rows({{0, 0, -0.5}, {0, 0, -1}, {-0.5, -1, 0}});
}

}  // namespace fixtures
