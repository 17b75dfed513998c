#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gridrisk/grid_model.hpp"
#include "gridrisk/power_flow.hpp"

namespace gridrisk {

enum class CoFPFForm { piecewise_linear, exponential_blend };

std::string to_string(CoFPFForm form);
CoFPFForm cofpf_form_from_string(std::string_view s);

/// Failure probability of one component as a function of its load ratio s.
///
/// piecewise_linear: p_min below s_d, linear ramp on [s_d, s_u], p_max above.
/// exponential_blend: below s_u the larger of the ramp and p_min * e^(b s)
/// with b chosen so the exponential reaches p_max exactly at s_u; p_max at or
/// above s_u. Both forms are non-decreasing in s, and the blend dominates the
/// ramp pointwise for equal parameters.
///
/// Parameters are validated at construction (0 < p_min < p_max < 1,
/// 0 <= s_d < s_u); evaluation is branch-only and allocation-free. Returned
/// probabilities are clamped to [1e-12, 1 - 1e-12] so path probabilities stay
/// finite in log space.
class CoFPF {
public:
    CoFPF(CoFPFForm form, double p_min, double p_max, double s_d, double s_u);

    double operator()(double s) const {
        double p;
        if (s > s_u_) {
            p = p_max_;
        } else {
            p = (s < s_d_) ? p_min_ : p_min_ + ramp_slope_ * (s - s_d_);
            if (form_ == CoFPFForm::exponential_blend) {
                if (s >= s_u_) {
                    p = p_max_;
                } else {
                    double e = p_min_ * std::exp(exp_rate_ * s);
                    if (e > p) p = e;
                }
            }
        }
        if (p < kProbFloor) p = kProbFloor;
        if (p > kProbCeil) p = kProbCeil;
        return p;
    }

    CoFPFForm form() const { return form_; }
    double p_min() const { return p_min_; }
    double p_max() const { return p_max_; }
    double s_d() const { return s_d_; }
    double s_u() const { return s_u_; }

    /// Same form with p_min shifted by -delta (clamped to stay valid).
    CoFPF with_pmin_delta(double delta) const;
    CoFPF with_form(CoFPFForm form) const;

    friend bool operator==(const CoFPF& a, const CoFPF& b) {
        return a.form_ == b.form_ && a.p_min_ == b.p_min_ && a.p_max_ == b.p_max_ &&
               a.s_d_ == b.s_d_ && a.s_u_ == b.s_u_;
    }

    static constexpr double kProbFloor = 1e-12;
    static constexpr double kProbCeil = 1.0 - 1e-12;

private:
    CoFPFForm form_;
    double p_min_, p_max_, s_d_, s_u_;
    double ramp_slope_;
    double exp_rate_;
};

/// Load ratio |flow| / rating of an ON component. Querying an OFF component
/// is a contract violation.
double condition(const GridCase& grid, const Topology& topo, const FlowState& flows,
                 int component);

/// One CoFPF per component, indexed by component id.
class CoFPFSet {
public:
    explicit CoFPFSet(std::vector<CoFPF> per_component);

    const CoFPF& operator[](int component) const {
        return entries_[static_cast<std::size_t>(component)];
    }
    std::size_t size() const { return entries_.size(); }
    const std::vector<CoFPF>& entries() const { return entries_; }

    std::uint64_t content_hash() const;

private:
    std::vector<CoFPF> entries_;
};

/// Survey-style defaults: s_d = 0.97, s_u = 1.3, p_max = 0.9995 and p_min
/// drawn i.i.d. uniform on [0.002, 0.006] from the named seed. Draws are
/// keyed by component id, so overriding one component never shifts another's
/// parameters.
CoFPFSet default_cofpf_set(std::size_t component_count, std::uint64_t seed);

/// Parses a CoFPF spec file. The format is line-oriented:
///
///   cofpfset 1
///   seed 1234
///   default form=piecewise p_min=uniform(0.002,0.006) p_max=0.9995 s_d=0.97 s_u=1.3
///   component 7 form=exponential
///   component 9 p_min=0.004
///
/// `default` applies to every component; `component <id>` lines override the
/// listed keys. p_min may be a number or uniform(a,b) resolved from `seed`.
CoFPFSet parse_cofpf_spec(std::string_view text, std::size_t component_count);
CoFPFSet load_cofpf_spec(const std::string& path, std::size_t component_count);

/// Canonical fully-resolved spec text (one `component` line per entry).
/// parse(serialize(s)) == s.
std::string serialize_cofpf_spec(const CoFPFSet& set);

}  // namespace gridrisk
