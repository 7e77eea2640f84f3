#pragma once

// Umbrella header: convergence of Gaussian conditional covariances at
// singular limits, the determinant asymptotics behind it, Lyapunov graphical
// models and the Toeplitz trek constructions.

#include "schurlim/convergence.hpp"
#include "schurlim/det_asymptotics.hpp"
#include "schurlim/io.hpp"
#include "schurlim/linalg.hpp"
#include "schurlim/lyapunov.hpp"
#include "schurlim/matrix.hpp"
#include "schurlim/random.hpp"
#include "schurlim/trek.hpp"
