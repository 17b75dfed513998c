#pragma once

#include <vector>

#include "gridrisk/grid_model.hpp"

namespace gridrisk {

/// Solved operating point: signed branch flows in MW (exactly 0 on OFF
/// branches), net bus injections, and the island partition they were solved
/// under.
struct FlowState {
    std::vector<double> branch_flow_mw;
    std::vector<double> bus_injection_mw;
    std::vector<int> island_of_bus;
    int island_count = 0;
};

/// Partition of buses into islands connected via ON branches. Island ids are
/// assigned in order of first appearance scanning buses in file order, so the
/// partition is deterministic.
std::vector<int> find_islands(const GridCase& grid, const Topology& topo,
                              int* island_count = nullptr);

/// Linearized power flow: branch flow = (angle_from - angle_to) / x, nodal
/// balance at every bus, one reference angle per island (the bus with the
/// lowest user id). Injections must balance within each island; a singular
/// island system raises NumericalError rather than returning NaN.
FlowState dc_power_flow(const GridCase& grid, const Topology& topo,
                        const std::vector<double>& injection_mw);

}  // namespace gridrisk
