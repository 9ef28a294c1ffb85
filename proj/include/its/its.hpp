#pragma once

// its: instanced textured simplification.
//
// A scene is one reference triangle mesh plus N affine instance transforms.
// Simplification runs once on the reference mesh, driven by a unified metric
// that blends quadric geometric error with point-cloud attribute error, and
// the result is propagated to every instance by its transform.

#include "its/attributes.hpp"
#include "its/harness.hpp"
#include "its/instancing.hpp"
#include "its/math.hpp"
#include "its/mesh.hpp"
#include "its/obj_io.hpp"
#include "its/pairs.hpp"
#include "its/quadric.hpp"
#include "its/simplify.hpp"
