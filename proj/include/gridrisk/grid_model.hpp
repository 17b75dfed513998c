#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gridrisk {

struct Bus {
    int id = 0;  // user-facing id from the case file
    std::string name;
};

struct Branch {
    int id = 0;       // user-facing id
    int from = 0;     // dense bus index
    int to = 0;       // dense bus index
    double x_pu = 0;  // series reactance, per unit, > 0
    double rating_mw = 0;
    bool initially_on = true;
};

struct Generator {
    int bus = 0;  // dense bus index
    double p_max_mw = 0;
};

struct Load {
    int bus = 0;  // dense bus index
    double demand_mw = 0;
};

struct Diagnostic {
    enum class Severity { warning, error };
    Severity severity = Severity::error;
    std::string message;
};

/// Static network description. Branches are the failure-prone components;
/// their position in `branches` is the component id used everywhere else
/// (samples, archives, reports). Immutable once built, safe to share across
/// threads by const reference.
struct GridCase {
    std::string name;
    double base_mva = 100.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Generator> generators;
    std::vector<Load> loads;

    std::size_t component_count() const { return branches.size(); }

    /// Dense index for a user bus id, or -1.
    int bus_index(int bus_id) const;

    double total_demand_mw() const;
    double total_capacity_mw() const;
};

/// Per-branch ON/OFF status. A branch that goes OFF during a cascade never
/// comes back; there is deliberately no set_on.
struct Topology {
    std::vector<std::uint8_t> on;

    bool is_on(int component) const {
        return on[static_cast<std::size_t>(component)] != 0;
    }
    void set_off(int component) {
        on[static_cast<std::size_t>(component)] = 0;
    }
    std::size_t on_count() const;
};

Topology initial_topology(const GridCase& grid);

enum class CaseFormat { native, matpower };

/// Parses a case file. Grammar violations throw ParseError with position;
/// semantic violations (dangling bus, non-positive reactance) throw DataError.
/// Non-fatal notes (ignored MATPOWER sections, substituted ratings) go to
/// `warnings` when provided.
GridCase parse_case(std::string_view text, CaseFormat format,
                    std::vector<Diagnostic>* warnings = nullptr);

GridCase load_case(const std::string& path, CaseFormat format,
                   std::vector<Diagnostic>* warnings = nullptr);

/// Structural validation. Empty result iff every invariant holds. Pure.
std::vector<Diagnostic> validate_case(const GridCase& grid);

/// Canonical native-format text. parse(serialize(c)) == c, and equal cases
/// serialize to identical bytes.
std::string serialize_case(const GridCase& grid);

std::uint64_t case_content_hash(const GridCase& grid);

bool operator==(const GridCase& a, const GridCase& b);

}  // namespace gridrisk
