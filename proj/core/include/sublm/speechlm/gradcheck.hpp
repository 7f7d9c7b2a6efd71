#pragma once

#include "sublm/ndl/gradcheck.hpp"
#include "sublm/speechlm/model.hpp"

namespace sublm::speechlm {

// Finite-difference check of the full loss gradient for one variant at tiny
// dimensions (hidden 8, mel 8, 2-unit context, 3-frame units), in 64-bit.
ndl::GradCheckResult gradcheck_variant(Variant variant, uint64_t seed = 1,
                                       size_t max_coords = 500);

} // namespace sublm::speechlm
