#include "gridrisk/cofpf.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "gridrisk/errors.hpp"
#include "gridrisk/hash.hpp"
#include "gridrisk/rng.hpp"

namespace gridrisk {

std::string to_string(CoFPFForm form) {
    return form == CoFPFForm::piecewise_linear ? "piecewise" : "exponential";
}

CoFPFForm cofpf_form_from_string(std::string_view s) {
    if (s == "piecewise") return CoFPFForm::piecewise_linear;
    if (s == "exponential") return CoFPFForm::exponential_blend;
    throw DataError("unknown CoFPF form '" + std::string(s) + "'");
}

CoFPF::CoFPF(CoFPFForm form, double p_min, double p_max, double s_d, double s_u)
    : form_(form), p_min_(p_min), p_max_(p_max), s_d_(s_d), s_u_(s_u) {
    if (!(p_min > 0 && p_min < p_max && p_max < 1)) {
        throw DataError("CoFPF requires 0 < p_min < p_max < 1");
    }
    if (!(s_d >= 0) || !(s_u > s_d) || !std::isfinite(s_u)) {
        throw DataError("CoFPF requires 0 <= s_d < s_u");
    }
    ramp_slope_ = (p_max_ - p_min_) / (s_u_ - s_d_);
    exp_rate_ = std::log(p_max_ / p_min_) / s_u_;
}

CoFPF CoFPF::with_pmin_delta(double delta) const {
    double p = p_min_ - delta;
    const double floor = 1e-9;
    if (p < floor) p = floor;
    if (p >= p_max_) p = std::nextafter(p_max_, 0.0);
    return CoFPF(form_, p, p_max_, s_d_, s_u_);
}

CoFPF CoFPF::with_form(CoFPFForm form) const {
    return CoFPF(form, p_min_, p_max_, s_d_, s_u_);
}

double condition(const GridCase& grid, const Topology& topo, const FlowState& flows,
                 int component) {
    if (component < 0 || component >= static_cast<int>(grid.branches.size())) {
        throw DataError("condition: component id out of range");
    }
    if (!topo.is_on(component)) {
        throw DataError("condition queried for OFF component " +
                        std::to_string(grid.branches[static_cast<std::size_t>(component)].id));
    }
    return std::abs(flows.branch_flow_mw[static_cast<std::size_t>(component)]) /
           grid.branches[static_cast<std::size_t>(component)].rating_mw;
}

CoFPFSet::CoFPFSet(std::vector<CoFPF> per_component) : entries_(std::move(per_component)) {
    if (entries_.empty()) throw DataError("CoFPF set must cover at least one component");
}

std::uint64_t CoFPFSet::content_hash() const {
    return fnv1a64(serialize_cofpf_spec(*this));
}

CoFPFSet default_cofpf_set(std::size_t component_count, std::uint64_t seed) {
    std::vector<CoFPF> entries;
    entries.reserve(component_count);
    for (std::size_t k = 0; k < component_count; ++k) {
        double p_min = 0.002 + 0.004 * SampleRng(seed, k).uniform();
        entries.emplace_back(CoFPFForm::piecewise_linear, p_min, 0.9995, 0.97, 1.3);
    }
    return CoFPFSet(std::move(entries));
}

namespace {

struct PminSpec {
    bool is_uniform = false;
    double value = 0;  // fixed value
    double lo = 0, hi = 0;
};

struct PartialCofpf {
    std::optional<CoFPFForm> form;
    std::optional<PminSpec> p_min;
    std::optional<double> p_max;
    std::optional<double> s_d;
    std::optional<double> s_u;
};

double num_or_throw(std::string_view text, int line) {
    double v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size() || !std::isfinite(v)) {
        throw ParseError("expected a finite number, got '" + std::string(text) + "'", line, 1);
    }
    return v;
}

void apply_kv(PartialCofpf& part, std::string_view key, std::string_view value, int line) {
    if (key == "form") {
        part.form = cofpf_form_from_string(value);
    } else if (key == "p_min") {
        PminSpec spec;
        if (value.starts_with("uniform(") && value.ends_with(")")) {
            std::string_view args = value.substr(8, value.size() - 9);
            std::size_t comma = args.find(',');
            if (comma == std::string_view::npos) {
                throw ParseError("p_min=uniform(a,b) needs two arguments", line, 1);
            }
            spec.is_uniform = true;
            spec.lo = num_or_throw(args.substr(0, comma), line);
            spec.hi = num_or_throw(args.substr(comma + 1), line);
        } else {
            spec.value = num_or_throw(value, line);
        }
        part.p_min = spec;
    } else if (key == "p_max") {
        part.p_max = num_or_throw(value, line);
    } else if (key == "s_d") {
        part.s_d = num_or_throw(value, line);
    } else if (key == "s_u") {
        part.s_u = num_or_throw(value, line);
    } else {
        throw ParseError("unknown CoFPF key '" + std::string(key) + "'", line, 1);
    }
}

void merge(PartialCofpf& into, const PartialCofpf& from) {
    if (!into.form && from.form) into.form = from.form;
    if (!into.p_min && from.p_min) into.p_min = from.p_min;
    if (!into.p_max && from.p_max) into.p_max = from.p_max;
    if (!into.s_d && from.s_d) into.s_d = from.s_d;
    if (!into.s_u && from.s_u) into.s_u = from.s_u;
}

}  // namespace

CoFPFSet parse_cofpf_spec(std::string_view text, std::size_t component_count) {
    if (component_count == 0) throw DataError("component count must be positive");

    PartialCofpf def;
    std::map<int, PartialCofpf> overrides;
    std::uint64_t seed = 0;
    bool saw_seed = false;
    bool saw_magic = false;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = (nl == std::string_view::npos) ? text.substr(pos)
                                                               : text.substr(pos, nl - pos);
        ++line_no;
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;

        std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        std::istringstream words{std::string(line)};
        std::string head;
        if (!(words >> head)) continue;

        if (!saw_magic) {
            std::string version;
            if (head != "cofpfset" || !(words >> version) || version != "1") {
                throw ParseError("expected header 'cofpfset 1'", line_no, 1);
            }
            saw_magic = true;
            continue;
        }
        if (head == "seed") {
            std::string v;
            if (!(words >> v)) throw ParseError("'seed' takes one value", line_no, 1);
            seed = std::stoull(v);
            saw_seed = true;
            continue;
        }

        PartialCofpf part;
        int component = -1;
        if (head == "component") {
            if (!(words >> component)) throw ParseError("'component' needs an id", line_no, 1);
            if (component < 0 || component >= static_cast<int>(component_count)) {
                throw DataError("CoFPF spec line " + std::to_string(line_no) +
                                ": component id " + std::to_string(component) +
                                " out of range [0," + std::to_string(component_count) + ")");
            }
        } else if (head != "default") {
            throw ParseError("expected 'default', 'component' or 'seed', got '" + head + "'",
                             line_no, 1);
        }
        std::string kv;
        while (words >> kv) {
            std::size_t eq = kv.find('=');
            if (eq == std::string::npos) {
                throw ParseError("expected key=value, got '" + kv + "'", line_no, 1);
            }
            apply_kv(part, std::string_view(kv).substr(0, eq),
                     std::string_view(kv).substr(eq + 1), line_no);
        }
        // repeated lines layer: keys on the later line win, the rest inherit
        if (head == "default") {
            merge(part, def);
            def = part;
        } else {
            auto [it, fresh] = overrides.emplace(component, part);
            if (!fresh) {
                merge(part, it->second);
                it->second = part;
            }
        }
    }
    if (!saw_magic) throw ParseError("empty CoFPF spec", 1, 1);

    std::vector<CoFPF> entries;
    entries.reserve(component_count);
    for (std::size_t k = 0; k < component_count; ++k) {
        PartialCofpf resolved;
        auto it = overrides.find(static_cast<int>(k));
        if (it != overrides.end()) resolved = it->second;
        merge(resolved, def);
        if (!resolved.form || !resolved.p_min || !resolved.p_max || !resolved.s_d ||
            !resolved.s_u) {
            throw DataError("component " + std::to_string(k) +
                            " has an incomplete CoFPF (need form, p_min, p_max, s_d, s_u)");
        }
        double p_min;
        if (resolved.p_min->is_uniform) {
            if (!saw_seed) throw DataError("p_min=uniform(...) requires a 'seed' line");
            p_min = resolved.p_min->lo +
                    (resolved.p_min->hi - resolved.p_min->lo) * SampleRng(seed, k).uniform();
        } else {
            p_min = resolved.p_min->value;
        }
        entries.emplace_back(*resolved.form, p_min, *resolved.p_max, *resolved.s_d,
                             *resolved.s_u);
    }
    return CoFPFSet(std::move(entries));
}

CoFPFSet load_cofpf_spec(const std::string& path, std::size_t component_count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open CoFPF spec: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_cofpf_spec(buf.str(), component_count);
}

std::string serialize_cofpf_spec(const CoFPFSet& set) {
    std::string out = "cofpfset 1\n";
    char buf[32];
    auto num = [&](double v) {
        auto r = std::to_chars(buf, buf + sizeof(buf), v);
        out.append(buf, r.ptr);
    };
    for (std::size_t k = 0; k < set.size(); ++k) {
        const CoFPF& f = set[static_cast<int>(k)];
        out += "component " + std::to_string(k) + " form=" + to_string(f.form());
        out += " p_min=";
        num(f.p_min());
        out += " p_max=";
        num(f.p_max());
        out += " s_d=";
        num(f.s_d());
        out += " s_u=";
        num(f.s_u());
        out += "\n";
    }
    return out;
}

}  // namespace gridrisk
