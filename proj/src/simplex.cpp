#include "gridrisk/simplex.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "gridrisk/errors.hpp"

namespace gridrisk::detail {

namespace {

constexpr double kCostEps = 1e-9;    // reduced-cost optimality threshold
constexpr double kPivotTol = 1e-8;   // smallest acceptable pivot magnitude
constexpr double kRatioTie = 1e-9;   // ratio-test tie window

enum class VarState : unsigned char { at_lower, at_upper, free_zero, basic };

}  // namespace

LpResult solve_bounded_lp(const LpProblem& p, std::vector<int> basis) {
    const int m = p.rows;
    const int n = p.cols;
    assert(static_cast<int>(basis.size()) == m);

    const int stride = n + 1;  // rhs lives in the last column
    const int obj = m;         // objective row index
    std::vector<double> t(static_cast<std::size_t>(m + 1) * static_cast<std::size_t>(stride), 0.0);
    auto tab = [&](int r, int j) -> double& {
        return t[static_cast<std::size_t>(r) * static_cast<std::size_t>(stride) +
                 static_cast<std::size_t>(j)];
    };
    for (int r = 0; r < m; ++r) {
        for (int j = 0; j < n; ++j) tab(r, j) = p.a[static_cast<std::size_t>(r) * n + j];
        tab(r, n) = p.b[static_cast<std::size_t>(r)];
    }
    for (int j = 0; j < n; ++j) tab(obj, j) = p.c[static_cast<std::size_t>(j)];

    std::vector<VarState> state(static_cast<std::size_t>(n));
    std::vector<double> xval(static_cast<std::size_t>(n), 0.0);  // nonbasic values
    for (int j = 0; j < n; ++j) {
        double lo = p.lo[static_cast<std::size_t>(j)];
        double up = p.up[static_cast<std::size_t>(j)];
        if (lo > up) throw DataError("LP variable with empty bound interval");
        if (std::isfinite(lo)) {
            state[static_cast<std::size_t>(j)] = VarState::at_lower;
            xval[static_cast<std::size_t>(j)] = lo;
        } else if (std::isfinite(up)) {
            state[static_cast<std::size_t>(j)] = VarState::at_upper;
            xval[static_cast<std::size_t>(j)] = up;
        } else {
            state[static_cast<std::size_t>(j)] = VarState::free_zero;
        }
    }
    for (int r = 0; r < m; ++r) state[static_cast<std::size_t>(basis[r])] = VarState::basic;

    // Gauss-Jordan reduction so each basic column becomes a unit column.
    for (int r = 0; r < m; ++r) {
        int bc = basis[static_cast<std::size_t>(r)];
        double piv = tab(r, bc);
        if (std::abs(piv) <= kPivotTol) {
            throw NumericalError("starting basis is numerically singular");
        }
        if (piv != 1.0) {
            for (int j = 0; j <= n; ++j) tab(r, j) /= piv;
        }
        for (int rr = 0; rr <= m; ++rr) {
            if (rr == r) continue;
            double f = tab(rr, bc);
            if (f == 0.0) continue;
            for (int j = 0; j <= n; ++j) tab(rr, j) -= f * tab(r, j);
            tab(rr, bc) = 0.0;  // kill residual roundoff
        }
    }

    // current basic values: xb[r] = rhs_r - sum over nonbasic j of T[r][j] * x_j
    std::vector<double> xb(static_cast<std::size_t>(m));
    for (int r = 0; r < m; ++r) {
        double v = tab(r, n);
        for (int j = 0; j < n; ++j) {
            if (state[static_cast<std::size_t>(j)] == VarState::basic) continue;
            double xj = xval[static_cast<std::size_t>(j)];
            if (xj != 0.0) v -= tab(r, j) * xj;
        }
        xb[static_cast<std::size_t>(r)] = v;
    }

    const int max_iter = 4000 + 40 * (m + n);
    const int bland_after = max_iter / 2;
    int iter = 0;

    for (; iter < max_iter; ++iter) {
        const bool bland = iter >= bland_after;

        // pricing
        int enter = -1;
        int dir = 0;  // +1 increase, -1 decrease
        double best = kCostEps;
        for (int j = 0; j < n; ++j) {
            VarState s = state[static_cast<std::size_t>(j)];
            if (s == VarState::basic) continue;
            if (p.lo[static_cast<std::size_t>(j)] == p.up[static_cast<std::size_t>(j)]) continue;
            double d = tab(obj, j);
            bool can_up = (s == VarState::at_lower || s == VarState::free_zero);
            bool can_down = (s == VarState::at_upper || s == VarState::free_zero);
            if (can_up && d < -best) {
                enter = j;
                dir = +1;
                if (bland) break;
                best = -d;
            } else if (can_down && d > best) {
                enter = j;
                dir = -1;
                if (bland) break;
                best = d;
            }
        }
        if (enter < 0) break;  // optimal

        // ratio test: entering moves by dir * step
        double step = kLpInf;
        int leave_row = -1;
        bool leave_at_upper = false;
        double span = p.up[static_cast<std::size_t>(enter)] - p.lo[static_cast<std::size_t>(enter)];
        if (std::isfinite(span)) step = span;  // bound flip candidate

        for (int r = 0; r < m; ++r) {
            double alpha = tab(r, enter);
            if (std::abs(alpha) <= kPivotTol) continue;
            int bcol = basis[static_cast<std::size_t>(r)];
            double delta = dir * alpha;  // xb[r] changes by -delta * step
            double cand;
            bool hits_upper;
            if (delta > 0) {
                double lo = p.lo[static_cast<std::size_t>(bcol)];
                if (!std::isfinite(lo)) continue;
                cand = (xb[static_cast<std::size_t>(r)] - lo) / delta;
                hits_upper = false;
            } else {
                double up = p.up[static_cast<std::size_t>(bcol)];
                if (!std::isfinite(up)) continue;
                cand = (up - xb[static_cast<std::size_t>(r)]) / (-delta);
                hits_upper = true;
            }
            if (cand < 0) cand = 0;  // roundoff pushed a basic var past its bound
            if (cand < step - kRatioTie) {
                step = cand;
                leave_row = r;
                leave_at_upper = hits_upper;
            } else if (cand <= step + kRatioTie && leave_row >= 0) {
                // tie: Bland wants the lowest leaving index; otherwise prefer
                // the larger pivot for stability
                bool take = bland
                                ? bcol < basis[static_cast<std::size_t>(leave_row)]
                                : std::abs(alpha) > std::abs(tab(leave_row, enter)) + 1e-12;
                if (take) {
                    step = std::min(step, cand);
                    leave_row = r;
                    leave_at_upper = hits_upper;
                }
            }
        }

        if (!std::isfinite(step)) throw NumericalError("LP is unbounded");

        if (leave_row < 0) {
            // entering variable runs to its opposite bound
            for (int r = 0; r < m; ++r) {
                xb[static_cast<std::size_t>(r)] -= dir * step * tab(r, enter);
            }
            if (dir > 0) {
                state[static_cast<std::size_t>(enter)] = VarState::at_upper;
                xval[static_cast<std::size_t>(enter)] = p.up[static_cast<std::size_t>(enter)];
            } else {
                state[static_cast<std::size_t>(enter)] = VarState::at_lower;
                xval[static_cast<std::size_t>(enter)] = p.lo[static_cast<std::size_t>(enter)];
            }
            continue;
        }

        double entering_value = xval[static_cast<std::size_t>(enter)] + dir * step;
        for (int r = 0; r < m; ++r) {
            xb[static_cast<std::size_t>(r)] -= dir * step * tab(r, enter);
        }

        int leave_col = basis[static_cast<std::size_t>(leave_row)];
        state[static_cast<std::size_t>(leave_col)] =
            leave_at_upper ? VarState::at_upper : VarState::at_lower;
        xval[static_cast<std::size_t>(leave_col)] =
            leave_at_upper ? p.up[static_cast<std::size_t>(leave_col)]
                           : p.lo[static_cast<std::size_t>(leave_col)];

        // pivot
        double piv = tab(leave_row, enter);
        if (std::abs(piv) <= kPivotTol) throw NumericalError("degenerate pivot");
        for (int j = 0; j <= n; ++j) tab(leave_row, j) /= piv;
        for (int rr = 0; rr <= m; ++rr) {
            if (rr == leave_row) continue;
            double f = tab(rr, enter);
            if (f == 0.0) continue;
            for (int j = 0; j <= n; ++j) tab(rr, j) -= f * tab(leave_row, j);
            tab(rr, enter) = 0.0;
        }
        basis[static_cast<std::size_t>(leave_row)] = enter;
        state[static_cast<std::size_t>(enter)] = VarState::basic;
        xb[static_cast<std::size_t>(leave_row)] = entering_value;
    }

    if (iter >= max_iter) throw NumericalError("simplex iteration limit reached");

    LpResult res;
    res.iterations = iter;
    res.x.assign(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        if (state[static_cast<std::size_t>(j)] != VarState::basic) {
            res.x[static_cast<std::size_t>(j)] = xval[static_cast<std::size_t>(j)];
        }
    }
    for (int r = 0; r < m; ++r) {
        res.x[static_cast<std::size_t>(basis[r])] = xb[static_cast<std::size_t>(r)];
    }
    for (int j = 0; j < n; ++j) {
        double lo = p.lo[static_cast<std::size_t>(j)];
        double up = p.up[static_cast<std::size_t>(j)];
        double& x = res.x[static_cast<std::size_t>(j)];
        if (std::isfinite(lo) && x < lo) x = lo;
        if (std::isfinite(up) && x > up) x = up;
        res.objective += p.c[static_cast<std::size_t>(j)] * x;
    }
    return res;
}

}  // namespace gridrisk::detail
