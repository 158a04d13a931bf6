#pragma once

#include "leaksim/gates.hpp"
#include "leaksim/rng.hpp"
#include "leaksim/tensor.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace leaksim {

struct GateOp {
    std::string gate;
    std::vector<Site> targets;
    friend bool operator==(const GateOp&, const GateOp&) = default;
};

struct MeasureOp {
    Site site;
    std::size_t slot;
    friend bool operator==(const MeasureOp&, const MeasureOp&) = default;
};

/// Resets `site` to |0>, consuming the outcome stored in `slot`.
struct ResetOp {
    Site site;
    std::size_t slot;
    friend bool operator==(const ResetOp&, const ResetOp&) = default;
};

using Instruction = std::variant<GateOp, MeasureOp, ResetOp>;

/// Sites an instruction acts on.
inline std::vector<Site> touched_sites(const Instruction& ins) {
    return std::visit(
        [](const auto& op) -> std::vector<Site> {
            if constexpr (std::is_same_v<std::decay_t<decltype(op)>, GateOp>) return op.targets;
            else return {op.site};
        },
        ins);
}

/// Ordered instruction list over a fixed number of sites, plus the gate
/// table its GateOps refer to. Every instruction is validated on insertion.
class Circuit {
public:
    explicit Circuit(std::size_t num_sites) : num_sites_(num_sites) {
        if (num_sites_ == 0) throw std::invalid_argument("Circuit: need at least one site");
    }

    std::size_t num_sites() const { return num_sites_; }
    std::size_t num_slots() const { return num_slots_; }
    const std::vector<Instruction>& instructions() const { return ops_; }
    const std::map<std::string, GateMatrix>& gates() const { return gates_; }
    std::size_t size() const { return ops_.size(); }

    const GateMatrix& gate_matrix(const std::string& id) const {
        auto it = gates_.find(id);
        if (it == gates_.end()) throw std::out_of_range("Circuit: unknown gate id '" + id + "'");
        return it->second;
    }

    /// Register `matrix` under `name`. If `name` is taken by a different
    /// matrix, a numbered variant "name#k" is used. Returns the id.
    std::string add_gate(const std::string& name, const GateMatrix& matrix) {
        std::string id = name;
        for (std::size_t k = 1;; ++k) {
            auto it = gates_.find(id);
            if (it == gates_.end()) {
                gates_.emplace(id, matrix);
                return id;
            }
            if (it->second == matrix) return id;
            id = name + "#" + std::to_string(k);
        }
    }

    Circuit& gate(const std::string& id, std::vector<Site> targets) {
        const GateMatrix& g = gate_matrix(id);
        if (targets.size() != g.arity())
            throw std::invalid_argument("Circuit: gate '" + id + "' has arity " + std::to_string(g.arity()) +
                                        " but got " + std::to_string(targets.size()) + " targets");
        for (std::size_t i = 0; i < targets.size(); ++i) {
            check_site(targets[i]);
            for (std::size_t j = 0; j < i; ++j)
                if (targets[i] == targets[j]) throw std::invalid_argument("Circuit: duplicate gate target");
        }
        ops_.push_back(GateOp{id, std::move(targets)});
        return *this;
    }

    Circuit& measure(Site site, std::size_t slot) {
        check_site(site);
        measured_slots_.insert(slot);
        num_slots_ = std::max(num_slots_, slot + 1);
        ops_.push_back(MeasureOp{site, slot});
        return *this;
    }

    Circuit& reset(Site site, std::size_t slot) {
        check_site(site);
        if (!measured_slots_.contains(slot))
            throw std::invalid_argument("Circuit: reset consumes slot " + std::to_string(slot) +
                                        " before any measurement writes it");
        ops_.push_back(ResetOp{site, slot});
        return *this;
    }

    /// Append every instruction of `other` (gate ids are re-registered).
    Circuit& append(const Circuit& other) {
        if (other.num_sites_ != num_sites_) throw std::invalid_argument("Circuit::append: site count mismatch");
        for (const auto& ins : other.ops_) {
            if (const auto* g = std::get_if<GateOp>(&ins)) {
                gate(add_gate(g->gate, other.gate_matrix(g->gate)), g->targets);
            } else if (const auto* m = std::get_if<MeasureOp>(&ins)) {
                measure(m->site, m->slot);
            } else {
                const auto& r = std::get<ResetOp>(ins);
                reset(r.site, r.slot);
            }
        }
        return *this;
    }

    std::size_t count_gate(const std::string& id) const {
        return static_cast<std::size_t>(std::ranges::count_if(ops_, [&](const Instruction& ins) {
            const auto* g = std::get_if<GateOp>(&ins);
            return g && g->gate == id;
        }));
    }

    std::size_t count_if_gate(auto&& pred) const {
        return static_cast<std::size_t>(std::ranges::count_if(ops_, [&](const Instruction& ins) {
            const auto* g = std::get_if<GateOp>(&ins);
            return g && pred(*g);
        }));
    }

    bool has_measurements() const {
        return std::ranges::any_of(ops_, [](const Instruction& ins) { return !std::holds_alternative<GateOp>(ins); });
    }

    /// Copy with only the instructions selected by `keep` (same gate table).
    Circuit filtered(const std::vector<bool>& keep) const {
        Circuit out(num_sites_);
        out.gates_ = gates_;
        for (std::size_t i = 0; i < ops_.size(); ++i) {
            if (!keep[i]) continue;
            if (const auto* m = std::get_if<MeasureOp>(&ops_[i])) {
                out.measured_slots_.insert(m->slot);
                out.num_slots_ = std::max(out.num_slots_, m->slot + 1);
            }
            out.ops_.push_back(ops_[i]);
        }
        return out;
    }

private:
    void check_site(Site s) const {
        if (s >= num_sites_)
            throw std::out_of_range("Circuit: site " + std::to_string(s) + " out of range for " +
                                    std::to_string(num_sites_) + " sites");
    }

    std::size_t num_sites_;
    std::size_t num_slots_ = 0;
    std::map<std::string, GateMatrix> gates_;
    std::vector<Instruction> ops_;
    std::set<std::size_t> measured_slots_;
};

inline const std::string kHadamardId = "H";

/// CZ+H SWAP between `a` and `b`, valid when `b` holds |0>:
/// H(b) CZ(a,b) H(a) H(b) CZ(a,b) H(a).
inline void append_swap_pair(Circuit& c, Site a, Site b, const std::string& cz_id) {
    const std::string h = c.add_gate(kHadamardId, hadamard());
    c.gate(h, {b});
    c.gate(cz_id, {a, b});
    c.gate(h, {a});
    c.gate(h, {b});
    c.gate(cz_id, {a, b});
    c.gate(h, {a});
}

inline Circuit swap_pair_circuit(std::size_t num_sites, Site a, Site b, const GateMatrix& cz) {
    Circuit c(num_sites);
    append_swap_pair(c, a, b, c.add_gate("CZ", cz));
    return c;
}

/// Cancel adjacent pairs of the same self-inverse gate on the same targets,
/// where no instruction in between touches any of those targets. Repeats
/// until no pair remains.
inline Circuit simplify(const Circuit& circuit) {
    std::map<std::string, bool> involutory;
    for (const auto& [id, g] : circuit.gates()) {
        involutory[id] = max_abs_diff(g.matrix() * g.matrix(), Matrix::identity(g.dim())) < kTolerance.unitarity;
    }

    const auto& ops = circuit.instructions();
    std::vector<bool> keep(ops.size(), true);
    bool changed = true;
    while (changed) {
        changed = false;
        // last[s] = index of the most recent kept instruction touching site s
        std::vector<std::ptrdiff_t> last(circuit.num_sites(), -1);
        for (std::size_t i = 0; i < ops.size(); ++i) {
            if (!keep[i]) continue;
            const auto sites = touched_sites(ops[i]);
            const auto* g = std::get_if<GateOp>(&ops[i]);
            if (g && involutory.at(g->gate)) {
                const std::ptrdiff_t prev = last[sites.front()];
                bool same_prev = prev >= 0;
                for (Site s : sites) same_prev = same_prev && last[s] == prev;
                if (same_prev) {
                    const auto* pg = std::get_if<GateOp>(&ops[static_cast<std::size_t>(prev)]);
                    if (pg && *pg == *g) {
                        keep[static_cast<std::size_t>(prev)] = false;
                        keep[i] = false;
                        changed = true;
                        // Restart so `last` is rebuilt without the removed pair.
                        break;
                    }
                }
            }
            for (Site s : sites) last[s] = static_cast<std::ptrdiff_t>(i);
        }
    }
    return circuit.filtered(keep);
}

inline constexpr std::size_t kMaxOracleSites = 4;

/// Full-space matrix of a gate acting on `targets`, built entrywise.
inline Matrix embedded_matrix(const GateMatrix& gate, std::span<const Site> targets, std::size_t num_sites) {
    const std::size_t dim = pow3(num_sites);
    auto digit = [&](std::size_t index, Site s) { return (index / pow3(num_sites - 1 - s)) % kLevels; };
    auto local_index = [&](std::size_t index) {
        std::size_t l = 0;
        for (Site t : targets) l = l * kLevels + digit(index, t);
        return l;
    };
    auto spectators_equal = [&](std::size_t i, std::size_t j) {
        for (Site s = 0; s < num_sites; ++s) {
            if (std::find(targets.begin(), targets.end(), s) != targets.end()) continue;
            if (digit(i, s) != digit(j, s)) return false;
        }
        return true;
    };
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            if (spectators_equal(i, j)) m(i, j) = gate(local_index(i), local_index(j));
    return m;
}

/// Product of the embedded gate matrices of a measurement-free circuit on at
/// most four sites.
inline Matrix circuit_unitary(const Circuit& circuit) {
    if (circuit.num_sites() > kMaxOracleSites)
        throw std::invalid_argument("circuit_unitary: at most " + std::to_string(kMaxOracleSites) + " sites");
    if (circuit.has_measurements())
        throw std::invalid_argument("circuit_unitary: circuit contains measure/reset instructions");
    Matrix u = Matrix::identity(pow3(circuit.num_sites()));
    for (const auto& ins : circuit.instructions()) {
        const auto& g = std::get<GateOp>(ins);
        u = embedded_matrix(circuit.gate_matrix(g.gate), g.targets, circuit.num_sites()) * u;
    }
    return u;
}

/// Run instructions [begin, end) on `state`. Measurement outcomes are
/// written to `slots`, which is grown to circuit.num_slots() if needed.
inline void execute(QutritState& state, const Circuit& circuit, Rng& rng, std::vector<Trit>& slots,
                    std::size_t begin = 0, std::size_t end = static_cast<std::size_t>(-1)) {
    if (state.num_sites() != circuit.num_sites()) throw std::invalid_argument("execute: site count mismatch");
    if (slots.size() < circuit.num_slots()) slots.resize(circuit.num_slots(), 0);
    end = std::min(end, circuit.size());
    for (std::size_t i = begin; i < end; ++i) {
        const auto& ins = circuit.instructions()[i];
        if (const auto* g = std::get_if<GateOp>(&ins)) {
            apply_gate(state, circuit.gate_matrix(g->gate), g->targets);
        } else if (const auto* m = std::get_if<MeasureOp>(&ins)) {
            slots[m->slot] = measure(state, m->site, rng);
        } else {
            const auto& r = std::get<ResetOp>(ins);
            reset(state, r.site, slots[r.slot]);
        }
    }
}

//============================================================================
// JSON
//============================================================================

inline nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < m.dim(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < m.dim(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

inline nlohmann::json to_json(const Circuit& c) {
    nlohmann::json gates = nlohmann::json::object();
    for (const auto& [id, g] : c.gates()) gates[id] = {{"arity", g.arity()}, {"matrix", matrix_to_json(g.matrix())}};

    nlohmann::json ops = nlohmann::json::array();
    for (const auto& ins : c.instructions()) {
        if (const auto* g = std::get_if<GateOp>(&ins)) {
            ops.push_back({{"op", "gate"}, {"gate", g->gate}, {"targets", g->targets}});
        } else if (const auto* m = std::get_if<MeasureOp>(&ins)) {
            ops.push_back({{"op", "measure"}, {"site", m->site}, {"slot", m->slot}});
        } else {
            const auto& r = std::get<ResetOp>(ins);
            ops.push_back({{"op", "reset"}, {"site", r.site}, {"slot", r.slot}});
        }
    }
    return {{"num_sites", c.num_sites()}, {"num_slots", c.num_slots()}, {"gates", gates}, {"instructions", ops}};
}

} // namespace leaksim
