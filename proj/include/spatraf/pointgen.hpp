#pragma once

#include <cstddef>

#include "spatraf/random.hpp"
#include "spatraf/types.hpp"

namespace spatraf::pointgen {

// Homogeneous Poisson process: Poisson(intensity * area) points, i.i.d. uniform.
PointPattern generate_ppp(double intensity, const Window& window, RandomStream& rng);

// Same with the count given directly.
PointPattern generate_uniform(std::size_t count, const Window& window, RandomStream& rng);

// Centered grid with ceil(sqrt(count)) points per side, filled row by row
// from y_min and trimmed to `count` in the last row.
PointPattern generate_lattice(std::size_t count, const Window& window);

// Gaussian displacement with std `sigma` per axis, reflected at the window edges.
PointPattern perturb(const PointPattern& pattern, double sigma, RandomStream& rng);

}  // namespace spatraf::pointgen
