#pragma once

#include <cstddef>
#include <functional>

#include "fbcp/model.hpp"

namespace fbcp {

/// Builds the starting posterior in working units: E[lambda] = c0/d0,
/// E[tau] = a0/b0, identity row covariances, factor means from the SVD of each
/// zero-filled unfolding or from standard normal draws.
ModelState init_model(const DenseTensor& y, const ObservationMask& mask, const PriorConfig& cfg);

/// E[A_i^(\n)T A_i^(\n)]: sum over the observed entries of slice i in mode n of
/// the Hadamard product of the other modes' second moments.
Matrix expected_kr_gram(const ModelState& state, std::size_t mode, std::size_t row);

/// Coordinate update of q(A^(n)); refreshes the mode's quad cache.
void update_factor(ModelState& state, std::size_t mode);

void update_lambda(ModelState& state);

/// E_q ||O * (Y - [[A]])||_F^2
double expected_model_error(const ModelState& state);

void update_tau(ModelState& state);

/// Evidence lower bound including every normalizing constant.
double lower_bound(const ModelState& state);

/// Average power of each component, sum_n ||m_r^(n)||^2 / sum_n I_n.
Vector component_power(const ModelState& state);

/// Removes components whose power is negligible. Returns the number removed.
std::size_t prune(ModelState& state);

/// Called after every factor update inside fit; lets variants post-process a mode.
using ModeHook = std::function<void(ModelState&, std::size_t mode)>;

FitResult fit(const DenseTensor& y, const ObservationMask& mask, const PriorConfig& cfg);
FitResult fit(const DenseTensor& y, const ObservationMask& mask, const PriorConfig& cfg,
              const ModeHook& after_factor_update);

/// Runs the coordinate-ascent loop on an already initialized state.
FitReport run_fit(ModelState& state, const ModeHook& after_factor_update = {});

/// Kruskal tensor of the posterior means, in the units of the input data.
DenseTensor reconstruct(const ModelState& state);

}  // namespace fbcp
