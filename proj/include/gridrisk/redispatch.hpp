#pragma once

#include <vector>

#include "gridrisk/grid_model.hpp"

namespace gridrisk {

/// Feasible operating point after redispatch: generator outputs, served load,
/// and the total unserved demand for this call.
struct DispatchResult {
    std::vector<double> gen_output_mw;    // per generator, 0 <= g <= p_max
    std::vector<double> served_mw;        // per load, 0 <= served <= demand
    std::vector<double> served_fraction;  // served / demand (1 for zero-demand loads)
    double shed_mw = 0;                   // total demand minus total served
    bool feasible = true;
};

struct DispatchOptions {
    /// Tie-break target: among minimum-shed points, stay close to this
    /// dispatch (weight 1e-6 per MW of generation change). When absent, a
    /// proportional-loading target is used, which makes the base operating
    /// point deterministic.
    const std::vector<double>* prev_gen_mw = nullptr;

    /// Per-load ceiling in MW. During a cascade this is the previously served
    /// amount: load dropped at an earlier stage is not re-energized, which
    /// keeps cumulative shed non-decreasing stage over stage.
    const std::vector<double>* served_cap_mw = nullptr;
};

/// Per island: maximize served load subject to the linearized flow equations,
/// branch ratings and generator limits. Serving nothing is always feasible,
/// so the program cannot be infeasible; numerical breakdown raises
/// NumericalError.
DispatchResult min_load_shed(const GridCase& grid, const Topology& topo,
                             const DispatchOptions& opts = {});

/// Net MW injection per bus implied by a dispatch (generation minus load).
std::vector<double> bus_injections_mw(const GridCase& grid, const DispatchResult& dispatch);

}  // namespace gridrisk
