#include "gridrisk/power_flow.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "gridrisk/errors.hpp"

namespace gridrisk {

namespace {

struct UnionFind {
    std::vector<int> parent;
    std::vector<int> size;

    explicit UnionFind(std::size_t n) : parent(n), size(n, 1) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[static_cast<std::size_t>(a)] < size[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
        size[static_cast<std::size_t>(a)] += size[static_cast<std::size_t>(b)];
    }
};

}  // namespace

std::vector<int> find_islands(const GridCase& grid, const Topology& topo, int* island_count) {
    const int nb = static_cast<int>(grid.buses.size());
    UnionFind uf(static_cast<std::size_t>(nb));
    for (std::size_t k = 0; k < grid.branches.size(); ++k) {
        if (!topo.is_on(static_cast<int>(k))) continue;
        uf.unite(grid.branches[k].from, grid.branches[k].to);
    }
    std::vector<int> island(static_cast<std::size_t>(nb), -1);
    std::vector<int> root_to_island(static_cast<std::size_t>(nb), -1);
    int next = 0;
    for (int b = 0; b < nb; ++b) {
        int r = uf.find(b);
        if (root_to_island[static_cast<std::size_t>(r)] < 0) {
            root_to_island[static_cast<std::size_t>(r)] = next++;
        }
        island[static_cast<std::size_t>(b)] = root_to_island[static_cast<std::size_t>(r)];
    }
    if (island_count) *island_count = next;
    return island;
}

FlowState dc_power_flow(const GridCase& grid, const Topology& topo,
                        const std::vector<double>& injection_mw) {
    const std::size_t nb = grid.buses.size();
    if (injection_mw.size() != nb) throw DataError("injection vector length != bus count");
    if (topo.on.size() != grid.branches.size()) throw DataError("topology length != branch count");

    FlowState state;
    state.bus_injection_mw = injection_mw;
    state.branch_flow_mw.assign(grid.branches.size(), 0.0);
    state.island_of_bus = find_islands(grid, topo, &state.island_count);

    std::vector<std::vector<int>> members(static_cast<std::size_t>(state.island_count));
    for (std::size_t b = 0; b < nb; ++b) {
        members[static_cast<std::size_t>(state.island_of_bus[b])].push_back(static_cast<int>(b));
    }
    // branches grouped by island (an ON branch has both ends in one island)
    std::vector<std::vector<int>> island_branches(static_cast<std::size_t>(state.island_count));
    for (std::size_t k = 0; k < grid.branches.size(); ++k) {
        if (!topo.is_on(static_cast<int>(k))) continue;
        island_branches[static_cast<std::size_t>(
                            state.island_of_bus[static_cast<std::size_t>(grid.branches[k].from)])]
            .push_back(static_cast<int>(k));
    }

    std::vector<double> theta(nb, 0.0);  // radians; flow_pu = (tf - tt) / x

    for (int isl = 0; isl < state.island_count; ++isl) {
        const auto& bus_list = members[static_cast<std::size_t>(isl)];

        double imbalance = 0, scale = 0;
        for (int b : bus_list) {
            imbalance += injection_mw[static_cast<std::size_t>(b)] / grid.base_mva;
            scale += std::abs(injection_mw[static_cast<std::size_t>(b)]) / grid.base_mva;
        }
        if (std::abs(imbalance) > 1e-8 * std::max(1.0, scale)) {
            throw NumericalError("island " + std::to_string(isl) +
                                 ": injections do not balance");
        }
        if (bus_list.size() == 1) continue;

        // reference bus: lowest user id in the island
        int ref = bus_list[0];
        for (int b : bus_list) {
            if (grid.buses[static_cast<std::size_t>(b)].id <
                grid.buses[static_cast<std::size_t>(ref)].id) {
                ref = b;
            }
        }
        std::vector<int> local(nb, -1);
        int nu = 0;
        for (int b : bus_list) {
            if (b != ref) local[static_cast<std::size_t>(b)] = nu++;
        }

        Eigen::MatrixXd susceptance = Eigen::MatrixXd::Zero(nu, nu);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nu);
        for (int k : island_branches[static_cast<std::size_t>(isl)]) {
            const Branch& br = grid.branches[static_cast<std::size_t>(k)];
            double b = 1.0 / br.x_pu;
            if (!std::isfinite(b)) {
                throw NumericalError("branch " + std::to_string(br.id) +
                                     ": susceptance overflows");
            }
            int lf = local[static_cast<std::size_t>(br.from)];
            int lt = local[static_cast<std::size_t>(br.to)];
            if (lf >= 0) susceptance(lf, lf) += b;
            if (lt >= 0) susceptance(lt, lt) += b;
            if (lf >= 0 && lt >= 0) {
                susceptance(lf, lt) -= b;
                susceptance(lt, lf) -= b;
            }
        }
        for (int b : bus_list) {
            int l = local[static_cast<std::size_t>(b)];
            if (l >= 0) rhs(l) = injection_mw[static_cast<std::size_t>(b)] / grid.base_mva;
        }

        Eigen::LLT<Eigen::MatrixXd> llt(susceptance);
        Eigen::VectorXd angles;
        if (llt.info() == Eigen::Success) {
            angles = llt.solve(rhs);
        } else {
            Eigen::LDLT<Eigen::MatrixXd> ldlt(susceptance);
            if (ldlt.info() != Eigen::Success) {
                throw NumericalError("island " + std::to_string(isl) +
                                     ": singular susceptance system");
            }
            angles = ldlt.solve(rhs);
        }
        if (!angles.allFinite()) {
            throw NumericalError("island " + std::to_string(isl) +
                                 ": non-finite power flow solution");
        }
        for (int b : bus_list) {
            int l = local[static_cast<std::size_t>(b)];
            theta[static_cast<std::size_t>(b)] = (l >= 0) ? angles(l) : 0.0;
        }
        for (int k : island_branches[static_cast<std::size_t>(isl)]) {
            const Branch& br = grid.branches[static_cast<std::size_t>(k)];
            double flow_pu = (theta[static_cast<std::size_t>(br.from)] -
                              theta[static_cast<std::size_t>(br.to)]) /
                             br.x_pu;
            state.branch_flow_mw[static_cast<std::size_t>(k)] = flow_pu * grid.base_mva;
        }
    }
    return state;
}

}  // namespace gridrisk
