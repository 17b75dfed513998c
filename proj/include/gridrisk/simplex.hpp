#pragma once

#include <limits>
#include <vector>

namespace gridrisk::detail {

inline constexpr double kLpInf = std::numeric_limits<double>::infinity();

/// Dense LP in equality form: minimize c.x subject to A x = b, lo <= x <= up.
/// Bounds may be -inf / +inf; a variable with lo == up is fixed.
struct LpProblem {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;  // row-major rows x cols
    std::vector<double> b;
    std::vector<double> c;
    std::vector<double> lo;
    std::vector<double> up;

    void resize(int m, int n) {
        rows = m;
        cols = n;
        a.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(n), 0.0);
        b.assign(static_cast<std::size_t>(m), 0.0);
        c.assign(static_cast<std::size_t>(n), 0.0);
        lo.assign(static_cast<std::size_t>(n), 0.0);
        up.assign(static_cast<std::size_t>(n), kLpInf);
    }
    double& at(int r, int j) {
        return a[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                 static_cast<std::size_t>(j)];
    }
};

struct LpResult {
    std::vector<double> x;
    double objective = 0;
    int iterations = 0;
};

/// Bounded-variable primal simplex on a dense tableau.
///
/// `basis` names one column per row; together they must form a nonsingular
/// basis that is feasible when every nonbasic column sits at its lower bound
/// (upper bound if the lower one is -inf, zero if free). Pivot selection is
/// deterministic: steepest reduced cost with lowest-index tie-breaking, and
/// Bland's rule after a stall threshold so termination is guaranteed.
///
/// Throws NumericalError on unbounded problems or iteration exhaustion.
LpResult solve_bounded_lp(const LpProblem& p, std::vector<int> basis);

}  // namespace gridrisk::detail
