#include "gridrisk/grid_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "gridrisk/errors.hpp"
#include "gridrisk/hash.hpp"

namespace gridrisk {

namespace {

// ---------------------------------------------------------------------------
// Small line/token scanner shared by the native and MATPOWER readers.
// ---------------------------------------------------------------------------

struct Token {
    std::string text;
    int line = 0;
    int col = 0;
};

// Splits one line into whitespace-separated tokens; '#' starts a comment.
std::vector<Token> tokenize_line(std::string_view line, int line_no) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == '#') break;
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
               line[i] != '#') {
            ++i;
        }
        out.push_back(Token{std::string(line.substr(start, i - start)), line_no,
                            static_cast<int>(start) + 1});
    }
    return out;
}

std::vector<std::vector<Token>> tokenize(std::string_view text) {
    std::vector<std::vector<Token>> lines;
    int line_no = 1;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = (nl == std::string_view::npos)
                                    ? text.substr(pos)
                                    : text.substr(pos, nl - pos);
        lines.push_back(tokenize_line(line, line_no));
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
        ++line_no;
    }
    return lines;
}

double parse_double(const Token& t) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size() || !std::isfinite(v)) {
        throw ParseError("expected a finite number, got '" + t.text + "'", t.line, t.col);
    }
    return v;
}

int parse_int(const Token& t) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
        throw ParseError("expected an integer, got '" + t.text + "'", t.line, t.col);
    }
    return v;
}

void fmt_double(std::string& out, double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, r.ptr);
}

void require_errors_empty(const std::vector<Diagnostic>& diags) {
    std::string msg;
    int n = 0;
    for (const auto& d : diags) {
        if (d.severity != Diagnostic::Severity::error) continue;
        if (n == 0) msg = d.message;
        ++n;
    }
    if (n == 1) throw DataError(msg);
    if (n > 1) throw DataError(msg + " (and " + std::to_string(n - 1) + " more)");
}

// ---------------------------------------------------------------------------
// Native format
// ---------------------------------------------------------------------------

GridCase parse_native(std::string_view text) {
    GridCase grid;
    auto lines = tokenize(text);

    // raw records with unresolved bus ids
    struct RawBranch {
        Token tok;
        int id, from_id, to_id;
        double x, rating;
        bool on;
    };
    struct RawAttach {
        Token tok;
        int bus_id;
        double value;
    };
    std::vector<RawBranch> raw_branches;
    std::vector<RawAttach> raw_gens, raw_loads;

    enum class Section { none, buses, branches, generators, loads };
    Section section = Section::none;
    bool saw_magic = false;
    bool saw_base = false;

    for (const auto& toks : lines) {
        if (toks.empty()) continue;
        const Token& head = toks.front();
        if (!saw_magic) {
            if (head.text != "gridcase" || toks.size() != 2) {
                throw ParseError("expected header 'gridcase <version>'", head.line, head.col);
            }
            int version = parse_int(toks[1]);
            if (version != 1) {
                throw ParseError("unsupported gridcase version " + toks[1].text,
                                 toks[1].line, toks[1].col);
            }
            saw_magic = true;
            continue;
        }
        if (head.text == "[buses]") { section = Section::buses; continue; }
        if (head.text == "[branches]") { section = Section::branches; continue; }
        if (head.text == "[generators]") { section = Section::generators; continue; }
        if (head.text == "[loads]") { section = Section::loads; continue; }
        if (head.text.front() == '[') {
            throw ParseError("unknown section '" + head.text + "'", head.line, head.col);
        }
        if (section == Section::none) {
            if (head.text == "name") {
                if (toks.size() != 2) throw ParseError("'name' takes one token", head.line, head.col);
                grid.name = toks[1].text;
            } else if (head.text == "base_mva") {
                if (toks.size() != 2) throw ParseError("'base_mva' takes one value", head.line, head.col);
                grid.base_mva = parse_double(toks[1]);
                saw_base = true;
            } else {
                throw ParseError("unknown directive '" + head.text + "'", head.line, head.col);
            }
            continue;
        }
        switch (section) {
            case Section::buses: {
                if (toks.size() > 2) {
                    throw ParseError("bus record is '<id> [name]'", toks[2].line, toks[2].col);
                }
                Bus b;
                b.id = parse_int(toks[0]);
                if (toks.size() == 2) b.name = toks[1].text;
                grid.buses.push_back(std::move(b));
                break;
            }
            case Section::branches: {
                if (toks.size() < 5 || toks.size() > 6) {
                    throw ParseError("branch record is '<id> <from> <to> <x_pu> <rating_mw> [on|off]'",
                                     head.line, head.col);
                }
                RawBranch rb;
                rb.tok = head;
                rb.id = parse_int(toks[0]);
                rb.from_id = parse_int(toks[1]);
                rb.to_id = parse_int(toks[2]);
                rb.x = parse_double(toks[3]);
                rb.rating = parse_double(toks[4]);
                rb.on = true;
                if (toks.size() == 6) {
                    if (toks[5].text == "on") rb.on = true;
                    else if (toks[5].text == "off") rb.on = false;
                    else throw ParseError("branch status must be 'on' or 'off'",
                                          toks[5].line, toks[5].col);
                }
                raw_branches.push_back(rb);
                break;
            }
            case Section::generators: {
                if (toks.size() != 2) {
                    throw ParseError("generator record is '<bus> <p_max_mw>'", head.line, head.col);
                }
                raw_gens.push_back(RawAttach{head, parse_int(toks[0]), parse_double(toks[1])});
                break;
            }
            case Section::loads: {
                if (toks.size() != 2) {
                    throw ParseError("load record is '<bus> <demand_mw>'", head.line, head.col);
                }
                raw_loads.push_back(RawAttach{head, parse_int(toks[0]), parse_double(toks[1])});
                break;
            }
            case Section::none: break;
        }
    }
    if (!saw_magic) throw ParseError("empty case file", 1, 1);
    if (!saw_base) throw DataError("case file has no base_mva");

    // resolve bus references
    std::unordered_map<int, int> index;
    for (std::size_t i = 0; i < grid.buses.size(); ++i) {
        index.emplace(grid.buses[i].id, static_cast<int>(i));
    }
    auto resolve = [&](int bus_id, const Token& tok) {
        auto it = index.find(bus_id);
        if (it == index.end()) {
            throw DataError("line " + std::to_string(tok.line) + ": unknown bus " +
                            std::to_string(bus_id));
        }
        return it->second;
    };
    for (const auto& rb : raw_branches) {
        Branch b;
        b.id = rb.id;
        b.from = resolve(rb.from_id, rb.tok);
        b.to = resolve(rb.to_id, rb.tok);
        b.x_pu = rb.x;
        b.rating_mw = rb.rating;
        b.initially_on = rb.on;
        grid.branches.push_back(b);
    }
    for (const auto& rg : raw_gens) {
        grid.generators.push_back(Generator{resolve(rg.bus_id, rg.tok), rg.value});
    }
    for (const auto& rl : raw_loads) {
        grid.loads.push_back(Load{resolve(rl.bus_id, rl.tok), rl.value});
    }
    return grid;
}

// ---------------------------------------------------------------------------
// MATPOWER subset: baseMVA plus the bus/gen/branch matrices. Everything else
// is skipped with a warning.
// ---------------------------------------------------------------------------

struct MpMatrix {
    std::vector<std::vector<double>> rows;
    int line = 0;
};

GridCase parse_matpower(std::string_view text, std::vector<Diagnostic>* warnings) {
    auto warn = [&](const std::string& msg) {
        if (warnings) warnings->push_back({Diagnostic::Severity::warning, msg});
    };

    // strip matlab comments (%) line by line, then scan assignments
    std::string cleaned;
    cleaned.reserve(text.size());
    {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t nl = text.find('\n', pos);
            std::string_view line = (nl == std::string_view::npos)
                                        ? text.substr(pos)
                                        : text.substr(pos, nl - pos);
            std::size_t pct = line.find('%');
            cleaned.append(line.substr(0, pct == std::string_view::npos ? line.size() : pct));
            cleaned.push_back('\n');
            if (nl == std::string_view::npos) break;
            pos = nl + 1;
        }
    }

    auto line_of = [&](std::size_t off) {
        return 1 + static_cast<int>(std::count(cleaned.begin(),
                                               cleaned.begin() + static_cast<long>(off), '\n'));
    };

    double base_mva = 0;
    bool saw_base = false;
    std::unordered_map<std::string, MpMatrix> matrices;

    std::size_t pos = 0;
    while ((pos = cleaned.find("mpc.", pos)) != std::string::npos) {
        std::size_t name_start = pos + 4;
        std::size_t name_end = name_start;
        while (name_end < cleaned.size() &&
               (std::isalnum(static_cast<unsigned char>(cleaned[name_end])) ||
                cleaned[name_end] == '_')) {
            ++name_end;
        }
        std::string field = cleaned.substr(name_start, name_end - name_start);
        std::size_t eq = cleaned.find('=', name_end);
        if (eq == std::string::npos) {
            throw ParseError("mpc." + field + " has no assignment", line_of(pos), 1);
        }
        std::size_t val = eq + 1;
        while (val < cleaned.size() && std::isspace(static_cast<unsigned char>(cleaned[val]))) ++val;
        if (val < cleaned.size() && cleaned[val] == '[') {
            std::size_t close = cleaned.find(']', val);
            if (close == std::string::npos) {
                throw ParseError("unterminated matrix for mpc." + field, line_of(val), 1);
            }
            if (field == "bus" || field == "gen" || field == "branch") {
                MpMatrix m;
                m.line = line_of(val);
                std::string body = cleaned.substr(val + 1, close - val - 1);
                std::replace(body.begin(), body.end(), ';', '\n');
                std::istringstream rows(body);
                std::string row;
                while (std::getline(rows, row)) {
                    std::istringstream cells(row);
                    std::vector<double> r;
                    std::string cell;
                    while (cells >> cell) {
                        double v = 0;
                        auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                        if (ec != std::errc() || p != cell.data() + cell.size()) {
                            throw ParseError("bad number '" + cell + "' in mpc." + field,
                                             m.line, 1);
                        }
                        r.push_back(v);
                    }
                    if (!r.empty()) m.rows.push_back(std::move(r));
                }
                matrices.emplace(field, std::move(m));
            } else {
                warn("ignored mpc." + field);
            }
            pos = close + 1;
        } else {
            std::size_t semi = cleaned.find(';', val);
            std::string rhs = cleaned.substr(val, semi == std::string::npos ? std::string::npos
                                                                            : semi - val);
            if (field == "baseMVA") {
                base_mva = std::strtod(rhs.c_str(), nullptr);
                saw_base = true;
            } else if (field != "version") {
                warn("ignored mpc." + field);
            }
            pos = semi == std::string::npos ? cleaned.size() : semi + 1;
        }
    }

    if (!saw_base) throw DataError("MATPOWER case has no mpc.baseMVA");
    if (!matrices.count("bus") || !matrices.count("branch")) {
        throw DataError("MATPOWER case needs mpc.bus and mpc.branch");
    }

    GridCase grid;
    grid.base_mva = base_mva;

    std::unordered_map<int, int> index;
    for (const auto& row : matrices["bus"].rows) {
        if (row.size() < 3) throw DataError("mpc.bus rows need at least BUS_I, TYPE, PD");
        Bus b;
        b.id = static_cast<int>(row[0]);
        index.emplace(b.id, static_cast<int>(grid.buses.size()));
        grid.buses.push_back(b);
        double pd = row[2];
        if (pd > 0) grid.loads.push_back(Load{static_cast<int>(grid.buses.size()) - 1, pd});
    }
    auto resolve = [&](double bus_id, const char* what) {
        auto it = index.find(static_cast<int>(bus_id));
        if (it == index.end()) {
            throw DataError(std::string(what) + " references unknown bus " +
                            std::to_string(static_cast<int>(bus_id)));
        }
        return it->second;
    };
    if (matrices.count("gen")) {
        for (const auto& row : matrices["gen"].rows) {
            if (row.size() < 9) throw DataError("mpc.gen rows need at least 9 columns");
            if (row[7] <= 0) {   // GEN_STATUS
                warn("skipped out-of-service generator at bus " +
                     std::to_string(static_cast<int>(row[0])));
                continue;
            }
            grid.generators.push_back(Generator{resolve(row[0], "generator"), row[8]});
        }
    }
    int next_branch_id = 1;
    for (const auto& row : matrices["branch"].rows) {
        if (row.size() < 6) throw DataError("mpc.branch rows need at least 6 columns");
        Branch b;
        b.id = next_branch_id++;
        b.from = resolve(row[0], "branch");
        b.to = resolve(row[1], "branch");
        b.x_pu = row[3];
        b.rating_mw = row[5];
        if (b.rating_mw == 0) {
            // MATPOWER uses 0 for "unlimited"
            b.rating_mw = 1e9;
            warn("branch " + std::to_string(b.id) + ": RATE_A=0 treated as unlimited (1e9 MW)");
        }
        b.initially_on = row.size() < 11 || row[10] != 0;
        grid.branches.push_back(b);
    }
    return grid;
}

}  // namespace

int GridCase::bus_index(int bus_id) const {
    for (std::size_t i = 0; i < buses.size(); ++i) {
        if (buses[i].id == bus_id) return static_cast<int>(i);
    }
    return -1;
}

double GridCase::total_demand_mw() const {
    double d = 0;
    for (const auto& l : loads) d += l.demand_mw;
    return d;
}

double GridCase::total_capacity_mw() const {
    double c = 0;
    for (const auto& g : generators) c += g.p_max_mw;
    return c;
}

std::size_t Topology::on_count() const {
    std::size_t n = 0;
    for (auto v : on) n += v ? 1 : 0;
    return n;
}

Topology initial_topology(const GridCase& grid) {
    Topology t;
    t.on.resize(grid.branches.size());
    for (std::size_t i = 0; i < grid.branches.size(); ++i) {
        t.on[i] = grid.branches[i].initially_on ? 1 : 0;
    }
    return t;
}

GridCase parse_case(std::string_view text, CaseFormat format,
                    std::vector<Diagnostic>* warnings) {
    if (text.empty()) throw ParseError("empty input", 1, 1);
    GridCase grid = (format == CaseFormat::native) ? parse_native(text)
                                                   : parse_matpower(text, warnings);
    require_errors_empty(validate_case(grid));
    return grid;
}

GridCase load_case(const std::string& path, CaseFormat format,
                   std::vector<Diagnostic>* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open case file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_case(buf.str(), format, warnings);
}

std::vector<Diagnostic> validate_case(const GridCase& grid) {
    std::vector<Diagnostic> diags;
    auto err = [&](const std::string& m) {
        diags.push_back({Diagnostic::Severity::error, m});
    };

    if (!(grid.base_mva > 0) || !std::isfinite(grid.base_mva)) {
        err("base_mva must be finite and > 0");
    }
    {
        std::unordered_set<int> seen;
        for (const auto& b : grid.buses) {
            if (!seen.insert(b.id).second) err("duplicate bus id " + std::to_string(b.id));
        }
    }
    const int nb = static_cast<int>(grid.buses.size());
    {
        std::unordered_set<int> seen;
        for (const auto& br : grid.branches) {
            std::string tag = "branch " + std::to_string(br.id);
            if (!seen.insert(br.id).second) err("duplicate branch id " + std::to_string(br.id));
            if (br.from < 0 || br.from >= nb || br.to < 0 || br.to >= nb) {
                err(tag + ": endpoint references no bus");
            } else if (br.from == br.to) {
                err(tag + ": self loop");
            }
            if (!(br.x_pu > 0) || !std::isfinite(br.x_pu)) {
                err(tag + ": reactance must be finite and > 0");
            }
            if (!(br.rating_mw > 0) || !std::isfinite(br.rating_mw)) {
                err(tag + ": rating must be finite and > 0");
            }
        }
    }
    for (std::size_t i = 0; i < grid.generators.size(); ++i) {
        const auto& g = grid.generators[i];
        if (g.bus < 0 || g.bus >= nb) err("generator " + std::to_string(i) + ": unknown bus");
        if (!(g.p_max_mw >= 0) || !std::isfinite(g.p_max_mw)) {
            err("generator " + std::to_string(i) + ": p_max must be finite and >= 0");
        }
    }
    for (std::size_t i = 0; i < grid.loads.size(); ++i) {
        const auto& l = grid.loads[i];
        if (l.bus < 0 || l.bus >= nb) err("load " + std::to_string(i) + ": unknown bus");
        if (!(l.demand_mw >= 0) || !std::isfinite(l.demand_mw)) {
            err("load " + std::to_string(i) + ": demand must be finite and >= 0");
        }
    }
    return diags;
}

std::string serialize_case(const GridCase& grid) {
    std::string out = "gridcase 1\n";
    if (!grid.name.empty()) {
        out += "name ";
        out += grid.name;
        out += "\n";
    }
    out += "base_mva ";
    fmt_double(out, grid.base_mva);
    out += "\n\n[buses]\n";
    for (const auto& b : grid.buses) {
        out += std::to_string(b.id);
        if (!b.name.empty()) {
            out += " ";
            out += b.name;
        }
        out += "\n";
    }
    out += "\n[branches]\n";
    for (const auto& br : grid.branches) {
        out += std::to_string(br.id);
        out += " ";
        out += std::to_string(grid.buses[static_cast<std::size_t>(br.from)].id);
        out += " ";
        out += std::to_string(grid.buses[static_cast<std::size_t>(br.to)].id);
        out += " ";
        fmt_double(out, br.x_pu);
        out += " ";
        fmt_double(out, br.rating_mw);
        if (!br.initially_on) out += " off";
        out += "\n";
    }
    out += "\n[generators]\n";
    for (const auto& g : grid.generators) {
        out += std::to_string(grid.buses[static_cast<std::size_t>(g.bus)].id);
        out += " ";
        fmt_double(out, g.p_max_mw);
        out += "\n";
    }
    out += "\n[loads]\n";
    for (const auto& l : grid.loads) {
        out += std::to_string(grid.buses[static_cast<std::size_t>(l.bus)].id);
        out += " ";
        fmt_double(out, l.demand_mw);
        out += "\n";
    }
    return out;
}

std::uint64_t case_content_hash(const GridCase& grid) {
    return fnv1a64(serialize_case(grid));
}

bool operator==(const GridCase& a, const GridCase& b) {
    auto bus_eq = [](const Bus& x, const Bus& y) { return x.id == y.id && x.name == y.name; };
    auto br_eq = [](const Branch& x, const Branch& y) {
        return x.id == y.id && x.from == y.from && x.to == y.to && x.x_pu == y.x_pu &&
               x.rating_mw == y.rating_mw && x.initially_on == y.initially_on;
    };
    auto gen_eq = [](const Generator& x, const Generator& y) {
        return x.bus == y.bus && x.p_max_mw == y.p_max_mw;
    };
    auto load_eq = [](const Load& x, const Load& y) {
        return x.bus == y.bus && x.demand_mw == y.demand_mw;
    };
    return a.name == b.name && a.base_mva == b.base_mva &&
           std::equal(a.buses.begin(), a.buses.end(), b.buses.begin(), b.buses.end(), bus_eq) &&
           std::equal(a.branches.begin(), a.branches.end(), b.branches.begin(),
                      b.branches.end(), br_eq) &&
           std::equal(a.generators.begin(), a.generators.end(), b.generators.begin(),
                      b.generators.end(), gen_eq) &&
           std::equal(a.loads.begin(), a.loads.end(), b.loads.begin(), b.loads.end(), load_eq);
}

}  // namespace gridrisk
