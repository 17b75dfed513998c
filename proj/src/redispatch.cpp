#include "gridrisk/redispatch.hpp"

#include <algorithm>
#include <cmath>

#include "gridrisk/errors.hpp"
#include "gridrisk/power_flow.hpp"
#include "gridrisk/simplex.hpp"

namespace gridrisk {

namespace {

constexpr double kTieBreakWeight = 1e-6;

// One island's linear program.
//
// Columns: bus angles (reference excluded, free), branch flows (bounded by
// ratings), generator outputs, served load, generation-change magnitudes,
// two slack families for the change rows, one fixed artificial per bus row.
// Rows: nodal balance per bus, flow definition per ON branch, and per
// generator the pair  g - u + s1 = g_prev,  g + u - s2 = g_prev  that pins
// u >= |g - g_prev|.
//
// All equality rows have a starting point with every structural variable at
// zero except u = g_prev, so the supplied basis is feasible and no phase-1
// pass is needed.
struct IslandParts {
    std::vector<int> bus_list;      // dense bus indices
    std::vector<int> branch_list;   // ON branches inside the island
    std::vector<int> gen_list;      // indices into grid.generators
    std::vector<int> load_list;     // indices into grid.loads
};

void solve_island(const GridCase& grid, const IslandParts& isl,
                  const std::vector<double>& prev_gen,
                  const std::vector<double>* served_cap, DispatchResult& out) {
    const int nb = static_cast<int>(isl.bus_list.size());
    const int nbr = static_cast<int>(isl.branch_list.size());
    const int ng = static_cast<int>(isl.gen_list.size());
    const int nl = static_cast<int>(isl.load_list.size());

    int ref = isl.bus_list[0];
    for (int b : isl.bus_list) {
        if (grid.buses[static_cast<std::size_t>(b)].id <
            grid.buses[static_cast<std::size_t>(ref)].id) {
            ref = b;
        }
    }
    std::vector<int> theta_col(grid.buses.size(), -1);

    const int n_theta = nb - 1;
    const int cols = n_theta + nbr + ng + nl + 3 * ng + nb;  // + u, s1, s2, artificials
    const int rows = nb + nbr + 2 * ng;

    detail::LpProblem lp;
    lp.resize(rows, cols);
    std::vector<int> basis(static_cast<std::size_t>(rows), -1);

    int c = 0;
    for (int b : isl.bus_list) {
        if (b == ref) continue;
        theta_col[static_cast<std::size_t>(b)] = c;
        lp.lo[static_cast<std::size_t>(c)] = -detail::kLpInf;
        lp.up[static_cast<std::size_t>(c)] = detail::kLpInf;
        ++c;
    }
    const int flow0 = c;
    for (int k : isl.branch_list) {
        double r = grid.branches[static_cast<std::size_t>(k)].rating_mw;
        lp.lo[static_cast<std::size_t>(c)] = -r;
        lp.up[static_cast<std::size_t>(c)] = r;
        ++c;
    }
    const int gen0 = c;
    for (int gi : isl.gen_list) {
        lp.lo[static_cast<std::size_t>(c)] = 0;
        lp.up[static_cast<std::size_t>(c)] = grid.generators[static_cast<std::size_t>(gi)].p_max_mw;
        ++c;
    }
    const int load0 = c;
    for (int li : isl.load_list) {
        double cap = grid.loads[static_cast<std::size_t>(li)].demand_mw;
        if (served_cap) cap = std::min(cap, std::max(0.0, (*served_cap)[static_cast<std::size_t>(li)]));
        lp.lo[static_cast<std::size_t>(c)] = 0;
        lp.up[static_cast<std::size_t>(c)] = cap;
        lp.c[static_cast<std::size_t>(c)] = -1.0;  // maximize served load
        ++c;
    }
    const int u0 = c;
    for (int g = 0; g < ng; ++g) {
        lp.c[static_cast<std::size_t>(c)] = kTieBreakWeight;
        ++c;
    }
    const int s1_0 = c;
    c += ng;
    const int s2_0 = c;
    c += ng;
    const int art0 = c;
    for (int b = 0; b < nb; ++b) {
        lp.lo[static_cast<std::size_t>(c)] = 0;
        lp.up[static_cast<std::size_t>(c)] = 0;  // fixed: equality rows stay exact
        ++c;
    }

    // nodal balance rows
    std::vector<int> bus_row(grid.buses.size(), -1);
    for (int b = 0; b < nb; ++b) {
        bus_row[static_cast<std::size_t>(isl.bus_list[static_cast<std::size_t>(b)])] = b;
        lp.at(b, art0 + b) = 1.0;
        basis[static_cast<std::size_t>(b)] = art0 + b;
    }
    for (int i = 0; i < nbr; ++i) {
        const Branch& br = grid.branches[static_cast<std::size_t>(isl.branch_list[static_cast<std::size_t>(i)])];
        lp.at(bus_row[static_cast<std::size_t>(br.from)], flow0 + i) -= 1.0;
        lp.at(bus_row[static_cast<std::size_t>(br.to)], flow0 + i) += 1.0;
    }
    for (int g = 0; g < ng; ++g) {
        int bus = grid.generators[static_cast<std::size_t>(isl.gen_list[static_cast<std::size_t>(g)])].bus;
        lp.at(bus_row[static_cast<std::size_t>(bus)], gen0 + g) += 1.0;
    }
    for (int l = 0; l < nl; ++l) {
        int bus = grid.loads[static_cast<std::size_t>(isl.load_list[static_cast<std::size_t>(l)])].bus;
        lp.at(bus_row[static_cast<std::size_t>(bus)], load0 + l) -= 1.0;
    }

    // flow definition rows: f - (theta_f - theta_t) * base / x = 0
    for (int i = 0; i < nbr; ++i) {
        const Branch& br = grid.branches[static_cast<std::size_t>(isl.branch_list[static_cast<std::size_t>(i)])];
        int row = nb + i;
        double coef = grid.base_mva / br.x_pu;
        lp.at(row, flow0 + i) = 1.0;
        int cf = theta_col[static_cast<std::size_t>(br.from)];
        int ct = theta_col[static_cast<std::size_t>(br.to)];
        if (cf >= 0) lp.at(row, cf) -= coef;
        if (ct >= 0) lp.at(row, ct) += coef;
        basis[static_cast<std::size_t>(row)] = flow0 + i;
    }

    // generation-change rows
    for (int g = 0; g < ng; ++g) {
        double gp = prev_gen[static_cast<std::size_t>(isl.gen_list[static_cast<std::size_t>(g)])];
        int r1 = nb + nbr + 2 * g;      // g - u + s1 = g_prev
        int r2 = nb + nbr + 2 * g + 1;  // g + u - s2 = g_prev
        lp.at(r1, gen0 + g) = 1.0;
        lp.at(r1, u0 + g) = -1.0;
        lp.at(r1, s1_0 + g) = 1.0;
        lp.b[static_cast<std::size_t>(r1)] = gp;
        lp.at(r2, gen0 + g) = 1.0;
        lp.at(r2, u0 + g) = 1.0;
        lp.at(r2, s2_0 + g) = -1.0;
        lp.b[static_cast<std::size_t>(r2)] = gp;
        basis[static_cast<std::size_t>(r1)] = s1_0 + g;
        basis[static_cast<std::size_t>(r2)] = u0 + g;
    }

    detail::LpResult sol = detail::solve_bounded_lp(lp, basis);

    for (int g = 0; g < ng; ++g) {
        int gi = isl.gen_list[static_cast<std::size_t>(g)];
        out.gen_output_mw[static_cast<std::size_t>(gi)] = sol.x[static_cast<std::size_t>(gen0 + g)];
    }
    for (int l = 0; l < nl; ++l) {
        int li = isl.load_list[static_cast<std::size_t>(l)];
        out.served_mw[static_cast<std::size_t>(li)] = sol.x[static_cast<std::size_t>(load0 + l)];
    }
}

}  // namespace

DispatchResult min_load_shed(const GridCase& grid, const Topology& topo,
                             const DispatchOptions& opts) {
    if (topo.on.size() != grid.branches.size()) {
        throw DataError("topology length != branch count");
    }
    const std::size_t ng = grid.generators.size();
    const std::size_t nl = grid.loads.size();

    int island_count = 0;
    std::vector<int> island = find_islands(grid, topo, &island_count);

    std::vector<IslandParts> islands(static_cast<std::size_t>(island_count));
    for (std::size_t b = 0; b < grid.buses.size(); ++b) {
        islands[static_cast<std::size_t>(island[b])].bus_list.push_back(static_cast<int>(b));
    }
    for (std::size_t k = 0; k < grid.branches.size(); ++k) {
        if (!topo.is_on(static_cast<int>(k))) continue;
        int isl = island[static_cast<std::size_t>(grid.branches[k].from)];
        islands[static_cast<std::size_t>(isl)].branch_list.push_back(static_cast<int>(k));
    }
    for (std::size_t g = 0; g < ng; ++g) {
        int isl = island[static_cast<std::size_t>(grid.generators[g].bus)];
        islands[static_cast<std::size_t>(isl)].gen_list.push_back(static_cast<int>(g));
    }
    for (std::size_t l = 0; l < nl; ++l) {
        int isl = island[static_cast<std::size_t>(grid.loads[l].bus)];
        islands[static_cast<std::size_t>(isl)].load_list.push_back(static_cast<int>(l));
    }

    // tie-break target: caller's previous dispatch, or proportional loading
    std::vector<double> prev_gen;
    if (opts.prev_gen_mw) {
        if (opts.prev_gen_mw->size() != ng) throw DataError("prev_gen length != generator count");
        prev_gen = *opts.prev_gen_mw;
    } else {
        prev_gen.assign(ng, 0.0);
        for (const auto& isl : islands) {
            double cap = 0, demand = 0;
            for (int g : isl.gen_list) cap += grid.generators[static_cast<std::size_t>(g)].p_max_mw;
            for (int l : isl.load_list) demand += grid.loads[static_cast<std::size_t>(l)].demand_mw;
            double ratio = (cap > 0) ? std::min(1.0, demand / cap) : 0.0;
            for (int g : isl.gen_list) {
                prev_gen[static_cast<std::size_t>(g)] =
                    ratio * grid.generators[static_cast<std::size_t>(g)].p_max_mw;
            }
        }
    }
    if (opts.served_cap_mw && opts.served_cap_mw->size() != nl) {
        throw DataError("served_cap length != load count");
    }

    DispatchResult out;
    out.gen_output_mw.assign(ng, 0.0);
    out.served_mw.assign(nl, 0.0);
    out.served_fraction.assign(nl, 1.0);

    for (auto& isl : islands) {
        if (isl.gen_list.empty() && isl.load_list.empty()) continue;
        solve_island(grid, isl, prev_gen, opts.served_cap_mw, out);
    }

    double total_demand = 0, total_served = 0;
    for (std::size_t l = 0; l < nl; ++l) {
        double d = grid.loads[l].demand_mw;
        double s = std::clamp(out.served_mw[l], 0.0, d);
        out.served_mw[l] = s;
        out.served_fraction[l] = (d > 0) ? s / d : 1.0;
        total_demand += d;
        total_served += s;
    }
    out.shed_mw = std::max(0.0, total_demand - total_served);

    // sanity: the reported point must obey the flow model it was solved under
    FlowState check = dc_power_flow(grid, topo, bus_injections_mw(grid, out));
    for (std::size_t k = 0; k < grid.branches.size(); ++k) {
        if (!topo.is_on(static_cast<int>(k))) continue;
        if (std::abs(check.branch_flow_mw[k]) > grid.branches[k].rating_mw + 1e-6) {
            throw NumericalError("redispatch produced an overloaded branch " +
                                 std::to_string(grid.branches[k].id));
        }
    }
    return out;
}

std::vector<double> bus_injections_mw(const GridCase& grid, const DispatchResult& dispatch) {
    std::vector<double> inj(grid.buses.size(), 0.0);
    for (std::size_t g = 0; g < grid.generators.size(); ++g) {
        inj[static_cast<std::size_t>(grid.generators[g].bus)] += dispatch.gen_output_mw[g];
    }
    for (std::size_t l = 0; l < grid.loads.size(); ++l) {
        inj[static_cast<std::size_t>(grid.loads[l].bus)] -= dispatch.served_mw[l];
    }
    return inj;
}

}  // namespace gridrisk
