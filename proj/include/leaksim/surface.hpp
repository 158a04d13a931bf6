#pragma once

// Distance-d surface-code block with an extra row of supplementary qubits,
// and the alternating downward/upward SWAP schedule that moves the encoded
// state onto the syndrome qubits after every cycle.
//
// Grid: 2d rows x (2d-1) columns. In odd cycles the main block is rows
// 0..2d-2 with data where (row+col) is even and the supplementary row is
// 2d-1. A downward transfer shifts the block one row, so in even cycles the
// main block is rows 1..2d-1 and row 0 is supplementary. Syndrome and
// supplementary qubits are read out and reset every cycle; data qubits never
// are.

#include <nlohmann/json.hpp>

#include <array>
#include <compare>
#include <cstddef>
#include <cstdlib>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace leaksim::surface {

enum class Role { data, syndrome_x, syndrome_z, supplementary };

inline const char* to_string(Role r) {
    switch (r) {
        case Role::data: return "data";
        case Role::syndrome_x: return "syndrome-x";
        case Role::syndrome_z: return "syndrome-z";
        case Role::supplementary: return "supplementary";
    }
    return "?";
}

/// Measured and reset at the end of a cycle in which the cell has this role.
constexpr bool is_measured(Role r) { return r != Role::data; }

struct Cell {
    int row = 0;
    int col = 0;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Cycle parity. Odd cycles come first.
enum class Epoch { odd = 0, even = 1 };

class SurfaceLayout {
public:
    int distance() const { return d_; }
    int rows() const { return 2 * d_; }
    int cols() const { return 2 * d_ - 1; }
    std::size_t num_cells() const { return static_cast<std::size_t>(rows() * cols()); }

    bool contains(Cell c) const { return c.row >= 0 && c.row < rows() && c.col >= 0 && c.col < cols(); }

    Role role(Cell c, Epoch e) const {
        if (!contains(c)) throw std::out_of_range("SurfaceLayout: cell outside grid");
        return roles_[static_cast<int>(e)][index(c)];
    }

    std::vector<Cell> cells() const {
        std::vector<Cell> out;
        for (int r = 0; r < rows(); ++r)
            for (int c = 0; c < cols(); ++c) out.push_back({r, c});
        return out;
    }

    std::size_t count(Role role, Epoch e) const {
        std::size_t n = 0;
        for (Role x : roles_[static_cast<int>(e)]) n += (x == role);
        return n;
    }

    std::size_t count_syndrome(Epoch e) const { return count(Role::syndrome_x, e) + count(Role::syndrome_z, e); }

    friend SurfaceLayout build_layout(int d);

private:
    std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row * cols() + c.col); }

    int d_ = 0;
    std::array<std::vector<Role>, 2> roles_;
};

/// Layout of a distance-d block plus its supplementary row.
inline SurfaceLayout build_layout(int d) {
    if (d < 2) throw std::invalid_argument("distance must be ≥ 2");
    SurfaceLayout L;
    L.d_ = d;
    for (auto& v : L.roles_) v.assign(L.num_cells(), Role::supplementary);

    // `top` is the first row of the main block; the checkerboard is anchored
    // to it so that the block is identical up to translation in both epochs.
    auto fill = [&](Epoch e, int top, int supplementary_row) {
        auto& roles = L.roles_[static_cast<int>(e)];
        for (int r = 0; r < L.rows(); ++r) {
            for (int c = 0; c < L.cols(); ++c) {
                if (r == supplementary_row) continue;
                const int local = r - top;
                Role role;
                if ((local + c) % 2 == 0) role = Role::data;
                else role = (local % 2 == 0) ? Role::syndrome_z : Role::syndrome_x;
                roles[L.index({r, c})] = role;
            }
        }
    };
    fill(Epoch::odd, 0, L.rows() - 1);
    fill(Epoch::even, 1, 0);
    return L;
}

struct SwapPair {
    Cell from; // holds the encoded state before the transfer
    Cell to;   // freshly reset cell that receives it
    friend bool operator==(const SwapPair&, const SwapPair&) = default;
};

struct SwapSchedule {
    std::vector<SwapPair> odd;  // after odd cycles: downward
    std::vector<SwapPair> even; // after even cycles: upward

    const std::vector<SwapPair>& pairs(Epoch e) const { return e == Epoch::odd ? odd : even; }
};

inline int direction(Epoch e) { return e == Epoch::odd ? +1 : -1; }

/// Pair every data cell with its neighbour one row down (odd) or up (even).
inline SwapSchedule build_schedule(const SurfaceLayout& layout) {
    SwapSchedule s;
    for (Epoch e : {Epoch::odd, Epoch::even}) {
        auto& out = e == Epoch::odd ? s.odd : s.even;
        for (const Cell& c : layout.cells()) {
            if (layout.role(c, e) != Role::data) continue;
            out.push_back({c, {c.row + direction(e), c.col}});
        }
    }
    return s;
}

/// Number of parallel layers needed to execute `pairs` when a cell can take
/// part in at most one SWAP per layer (greedy, in list order).
inline std::size_t layer_count(const std::vector<SwapPair>& pairs) {
    std::vector<std::set<Cell>> layers;
    for (const auto& p : pairs) {
        bool placed = false;
        for (auto& busy : layers) {
            if (busy.contains(p.from) || busy.contains(p.to)) continue;
            busy.insert(p.from);
            busy.insert(p.to);
            placed = true;
            break;
        }
        if (!placed) layers.push_back({p.from, p.to});
    }
    return layers.size();
}

struct CheckResult {
    std::string name;
    bool passed = true;
    std::vector<std::string> failures;
};

struct ValidationReport {
    int distance = 0;
    std::size_t supplementary = 0;
    std::size_t data = 0;
    std::size_t syndrome = 0;
    std::size_t total = 0;
    std::array<std::size_t, 2> layers{};
    std::vector<CheckResult> checks;

    bool ok() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }

    const CheckResult& check(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return c;
        throw std::out_of_range("no check named " + name);
    }
};

namespace detail {
inline std::string cell_str(Cell c) { return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")"; }
} // namespace detail

/// Check the leakage-resilience invariants of a layout/schedule pair. Never
/// throws on a bad schedule; every violation is listed in the report.
inline ValidationReport validate(const SurfaceLayout& layout, const SwapSchedule& schedule) {
    using detail::cell_str;
    ValidationReport rep;
    const int d = layout.distance();
    rep.distance = d;
    rep.supplementary = layout.count(Role::supplementary, Epoch::odd);
    rep.data = layout.count(Role::data, Epoch::odd);
    rep.syndrome = layout.count_syndrome(Epoch::odd);
    rep.total = layout.num_cells();

    auto add = [&](CheckResult c) {
        c.passed = c.failures.empty();
        rep.checks.push_back(std::move(c));
    };
    const char* epoch_name[] = {"odd", "even"};

    {
        CheckResult c{"supplementary-count"};
        for (Epoch e : {Epoch::odd, Epoch::even}) {
            const auto n = layout.count(Role::supplementary, e);
            if (n != static_cast<std::size_t>(2 * d - 1))
                c.failures.push_back(std::string(epoch_name[int(e)]) + " cycles have " + std::to_string(n) +
                                     " supplementary qubits, expected " + std::to_string(2 * d - 1));
        }
        add(std::move(c));
    }
    {
        CheckResult c{"disjoint"};
        for (Epoch e : {Epoch::odd, Epoch::even}) {
            std::set<Cell> used;
            for (const auto& p : schedule.pairs(e))
                for (Cell x : {p.from, p.to})
                    if (!used.insert(x).second)
                        c.failures.push_back(std::string(epoch_name[int(e)]) + " set uses cell " + cell_str(x) +
                                             " more than once");
        }
        add(std::move(c));
    }
    {
        CheckResult c{"nearest-neighbor"};
        for (Epoch e : {Epoch::odd, Epoch::even}) {
            for (const auto& p : schedule.pairs(e)) {
                if (!layout.contains(p.from) || !layout.contains(p.to)) {
                    c.failures.push_back("pair " + cell_str(p.from) + "-" + cell_str(p.to) + " leaves the grid");
                    continue;
                }
                if (p.from.col != p.to.col || std::abs(p.from.row - p.to.row) != 1)
                    c.failures.push_back("pair " + cell_str(p.from) + "-" + cell_str(p.to) +
                                         " is not a vertical nearest-neighbor pair");
                else if (p.to.row - p.from.row != direction(e))
                    c.failures.push_back(std::string(epoch_name[int(e)]) + " pair " + cell_str(p.from) + "-" +
                                         cell_str(p.to) + " points the wrong way");
            }
        }
        add(std::move(c));
    }
    {
        // Every data cell hands its state to a cell that was reset this cycle,
        // and the receiving cells are exactly the next epoch's data cells.
        CheckResult c{"transfer-coverage"};
        for (Epoch e : {Epoch::odd, Epoch::even}) {
            const Epoch next = e == Epoch::odd ? Epoch::even : Epoch::odd;
            std::map<Cell, int> sources;
            std::set<Cell> targets;
            for (const auto& p : schedule.pairs(e)) {
                if (!layout.contains(p.from) || !layout.contains(p.to)) continue;
                ++sources[p.from];
                targets.insert(p.to);
                if (layout.role(p.from, e) != Role::data)
                    c.failures.push_back(std::string(epoch_name[int(e)]) + " pair source " + cell_str(p.from) +
                                         " is not a data qubit");
                if (!is_measured(layout.role(p.to, e)))
                    c.failures.push_back(std::string(epoch_name[int(e)]) + " pair target " + cell_str(p.to) +
                                         " is not reset before the transfer");
            }
            for (const Cell& x : layout.cells()) {
                if (layout.role(x, e) == Role::data && !sources.contains(x))
                    c.failures.push_back(std::string(epoch_name[int(e)]) + " data qubit " + cell_str(x) +
                                         " is never transferred");
                if (layout.role(x, next) == Role::data && !targets.contains(x))
                    c.failures.push_back(std::string(epoch_name[int(e)]) + " transfer leaves next data cell " +
                                         cell_str(x) + " empty");
            }
        }
        add(std::move(c));
    }
    {
        CheckResult c{"measured-within-2-cycles"};
        for (const Cell& x : layout.cells())
            if (!is_measured(layout.role(x, Epoch::odd)) && !is_measured(layout.role(x, Epoch::even)))
                c.failures.push_back("cell " + cell_str(x) + " is never read out");
        add(std::move(c));
    }
    {
        CheckResult c{"single-layer"};
        for (Epoch e : {Epoch::odd, Epoch::even}) {
            const auto n = layer_count(schedule.pairs(e));
            rep.layers[int(e)] = n;
            if (n != 1)
                c.failures.push_back(std::string(epoch_name[int(e)]) + " transfer needs " + std::to_string(n) +
                                     " SWAP layers");
        }
        add(std::move(c));
    }
    {
        // Following the odd then the even transfer must bring every data
        // qubit back to where it started.
        CheckResult c{"periodicity"};
        std::map<Cell, Cell> down, up;
        for (const auto& p : schedule.odd) down[p.from] = p.to;
        for (const auto& p : schedule.even) up[p.from] = p.to;
        for (const Cell& x : layout.cells()) {
            if (layout.role(x, Epoch::odd) != Role::data) continue;
            auto a = down.find(x);
            if (a == down.end()) {
                c.failures.push_back("data qubit " + cell_str(x) + " has no odd transfer");
                continue;
            }
            auto b = up.find(a->second);
            if (b == up.end() || !(b->second == x))
                c.failures.push_back("data qubit " + cell_str(x) + " does not return after two cycles");
        }
        add(std::move(c));
    }
    return rep;
}

inline void print_report(std::ostream& out, const ValidationReport& rep) {
    out << "distance " << rep.distance << ": " << rep.data << " data, " << rep.syndrome << " syndrome, "
        << rep.supplementary << " supplementary, " << rep.total << " total qubits\n";
    out << "SWAP layers per cycle: odd " << rep.layers[0] << ", even " << rep.layers[1] << "\n";
    for (const auto& c : rep.checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << "\n";
        for (const auto& f : c.failures) out << "  - " << f << "\n";
    }
}

inline nlohmann::json to_json(const SurfaceLayout& layout, const SwapSchedule& schedule) {
    nlohmann::json cells = nlohmann::json::array();
    for (const Cell& c : layout.cells()) {
        cells.push_back({{"row", c.row},
                         {"col", c.col},
                         {"role_odd", to_string(layout.role(c, Epoch::odd))},
                         {"role_even", to_string(layout.role(c, Epoch::even))}});
    }
    auto pairs = [](const std::vector<SwapPair>& ps) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& p : ps) out.push_back({{"from", {p.from.row, p.from.col}}, {"to", {p.to.row, p.to.col}}});
        return out;
    };
    return {{"distance", layout.distance()},
            {"rows", layout.rows()},
            {"cols", layout.cols()},
            {"counts",
             {{"data", layout.count(Role::data, Epoch::odd)},
              {"syndrome", layout.count_syndrome(Epoch::odd)},
              {"supplementary", layout.count(Role::supplementary, Epoch::odd)},
              {"total", layout.num_cells()}}},
            {"conventions",
             {"checkerboard: data where (row - top_row + col) is even",
              "syndrome-z on even local rows, syndrome-x on odd local rows (schematic coloring)",
              "supplementary qubits idle during stabilizer measurement and are read out and reset each cycle"}},
            {"cells", cells},
            {"schedule",
             {{"odd", {{"direction", "down"}, {"pairs", pairs(schedule.odd)}}},
              {"even", {{"direction", "up"}, {"pairs", pairs(schedule.even)}}}}}};
}

} // namespace leaksim::surface
