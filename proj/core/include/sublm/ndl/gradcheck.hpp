#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sublm/ndl/params.hpp"
#include "sublm/util/rng.hpp"

namespace sublm::ndl {

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_tensor;
  size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  size_t coords_checked = 0;

  bool passed(double tol = 1e-4) const { return max_rel_err < tol; }
};

// Central-difference check of analytic gradients. `loss` re-evaluates the
// model loss from the current parameter values; `params[k].grad` must already
// hold the analytic gradient. At most `max_coords` coordinates are probed,
// chosen by a seeded draw so reruns are stable. 64-bit parameters expected.
inline GradCheckResult grad_check(const std::function<double()>& loss,
                                  NamedParamList<double>& params, double eps = 1e-5,
                                  size_t max_coords = 500, uint64_t seed = 0) {
  size_t total = 0;
  for (auto& p : params) total += p.value->size();

  // Map a flat coordinate to (tensor, index).
  auto locate = [&](size_t flat) {
    for (size_t k = 0; k < params.size(); ++k) {
      if (flat < params[k].value->size()) return std::pair<size_t, size_t>{k, flat};
      flat -= params[k].value->size();
    }
    throw ValidationError("grad_check: coordinate out of range");
  };

  std::vector<size_t> coords;
  if (total <= max_coords) {
    coords.resize(total);
    for (size_t i = 0; i < total; ++i) coords[i] = i;
  } else {
    util::Rng rng(seed ^ 0x6772616463686bull); // tag the stream
    std::vector<size_t> all(total);
    for (size_t i = 0; i < total; ++i) all[i] = i;
    rng.shuffle(all);
    coords.assign(all.begin(), all.begin() + static_cast<ptrdiff_t>(max_coords));
  }

  GradCheckResult result;
  result.coords_checked = coords.size();
  for (size_t flat : coords) {
    auto [k, idx] = locate(flat);
    double& value = params[k].value->data[idx];
    const double saved = value;
    auto central_diff = [&](double step) {
      value = saved + step;
      const double up = loss();
      value = saved - step;
      const double down = loss();
      value = saved;
      return (up - down) / (2.0 * step);
    };
    auto rel_err = [](double a, double n) {
      return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-8});
    };

    double numeric = central_diff(eps);
    const double analytic = params[k].grad->data[idx];
    double rel = rel_err(analytic, numeric);
    // Coordinates whose gradient sits below the rounding noise of the
    // difference quotient get a second measurement with a coarser step.
    if (rel > 0.0 && std::max(std::abs(analytic), std::abs(numeric)) < 1e-5) {
      const double coarse = central_diff(eps * 100.0);
      const double coarse_rel = rel_err(analytic, coarse);
      if (coarse_rel < rel) {
        rel = coarse_rel;
        numeric = coarse;
      }
    }
    if (rel > result.max_rel_err) {
      result.max_rel_err = rel;
      result.worst_tensor = params[k].name;
      result.worst_index = idx;
      result.worst_analytic = analytic;
      result.worst_numeric = numeric;
    }
  }
  return result;
}

} // namespace sublm::ndl
