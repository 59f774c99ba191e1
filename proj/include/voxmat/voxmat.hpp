#pragma once

// Volumetric (3D) image matting for CT: grids, trimap generation,
// closed-form and KNN matting Laplacians, a PCG solver, matting metrics,
// and synthetic phantoms for validation.

#include "voxmat/connectivity.hpp"
#include "voxmat/cf_laplacian.hpp"
#include "voxmat/errors.hpp"
#include "voxmat/grid.hpp"
#include "voxmat/io.hpp"
#include "voxmat/knn_laplacian.hpp"
#include "voxmat/metrics.hpp"
#include "voxmat/phantom.hpp"
#include "voxmat/solver.hpp"
#include "voxmat/sparse.hpp"
#include "voxmat/trimap.hpp"
#include "voxmat/volume_ops.hpp"
