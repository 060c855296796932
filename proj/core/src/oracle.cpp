#include "atab/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>

namespace atab {

namespace {

using Mask = std::uint64_t;

constexpr Mask bit(int id) { return Mask{1} << id; }

/// Precomputed scheduling view of one tree. A search state is fully
/// described by the set of executed nodes: thread program counters, lock
/// holders and join progress are all functions of that set, so the memo key
/// is a single bit mask.
struct Sim {
    TreeIndex ix;
    int n;
    Mask full;
    Mask nonterm_leaves = 0;          ///< leaves that are not `$`
    std::vector<Mask> subtree;        ///< per node: its subtree's bit mask
    std::vector<Mask> jo_watch;       ///< per Join node: nodes it waits on
    std::vector<bool> jo_possible;    ///< per Join node: every watched leaf is `$`
    std::vector<Mask> label_leaves;   ///< ids aligned with label_names
    std::vector<std::string> label_names;

    explicit Sim(const Node& t, int lock_count) : ix(t) {
        n = static_cast<int>(ix.nodes.size());
        if (n > 64)
            throw std::invalid_argument("oracle supports at most 64 nodes");
        if (!is_join_lock_well_formed(t, lock_count))
            throw std::invalid_argument("tree is not join-lock-well-formed");
        full = n == 64 ? ~Mask{0} : bit(n) - 1;

        subtree.assign(n, 0);
        for (int id = n - 1; id >= 0; --id) {
            Mask m = bit(id);
            for (int c : ix.children[id]) m |= subtree[c];
            subtree[id] = m;
        }
        for (std::size_t th = 0; th < ix.thread_leaf.size(); ++th) {
            const Node& leaf = *ix.nodes[ix.thread_leaf[th]];
            if (leaf.kind != Kind::Terminate) nonterm_leaves |= bit(ix.thread_leaf[th]);
            if (leaf.kind == Kind::Label) {
                auto it = std::find(label_names.begin(), label_names.end(), leaf.label);
                std::size_t slot = it - label_names.begin();
                if (it == label_names.end()) {
                    label_names.push_back(leaf.label);
                    label_leaves.push_back(0);
                }
                label_leaves[slot] |= bit(ix.thread_leaf[th]);
            }
        }

        // A join waits for every thread of the subtrees spawned earlier on
        // its own spine to terminate. Threads that stop at bot or at a label
        // never terminate, so a join over such a subtree can never fire.
        jo_watch.assign(n, 0);
        jo_possible.assign(n, true);
        for (std::size_t th = 0; th < ix.thread_spine.size(); ++th) {
            Mask watched = 0;
            for (int id : ix.thread_spine[th]) {
                const Node& node = *ix.nodes[id];
                if (node.kind == Kind::Join) {
                    jo_watch[id] = watched;
                    jo_possible[id] = (watched & nonterm_leaves) == 0;
                } else if (node.kind == Kind::Spawn) {
                    watched |= subtree[ix.children[id][1]];
                }
            }
        }
    }

    Mask label_mask(const std::string& l) const {
        for (std::size_t i = 0; i < label_names.size(); ++i)
            if (label_names[i] == l) return label_leaves[i];
        return 0;
    }

    /// A node is a move candidate when its parent has executed (threads
    /// advance along their spines; a spawn's second child becomes available
    /// the moment the spawn executes).
    bool candidate(int id, Mask executed) const {
        if (executed & bit(id)) return false;
        int p = ix.parent[id];
        return p < 0 || (executed & bit(p));
    }

    /// Kind-specific legality. `held` is the global lock-holder mask.
    bool legal(int id, Mask executed, std::uint32_t held) const {
        const Node& node = *ix.nodes[id];
        switch (node.kind) {
            case Kind::Acquire: return (held & (1u << node.lock)) == 0;
            case Kind::Join:
                return jo_possible[id] && (jo_watch[id] & ~executed) == 0;
            default: return true;
        }
    }

    std::uint32_t held_after(int id, std::uint32_t held) const {
        const Node& node = *ix.nodes[id];
        if (node.kind == Kind::Acquire) return held | (1u << node.lock);
        if (node.kind == Kind::Release) return held & ~(1u << node.lock);
        return held;
    }
};

bool search_complete(const Sim& sim, Mask executed, std::uint32_t held,
                     std::unordered_map<Mask, bool>& memo) {
    if (executed == sim.full) return true;
    auto it = memo.find(executed);
    if (it != memo.end()) return it->second;
    bool ok = false;
    for (int id = 0; id < sim.n && !ok; ++id) {
        if (!sim.candidate(id, executed) || !sim.legal(id, executed, held)) continue;
        ok = search_complete(sim, executed | bit(id), sim.held_after(id, held), memo);
    }
    memo.emplace(executed, ok);
    return ok;
}

bool search_predicate(const Sim& sim, Mask executed, std::uint32_t held, Mask want1,
                      Mask want2, std::unordered_set<Mask>& seen) {
    bool hit = (want1 == want2)
                   ? std::popcount(executed & want1) >= 2
                   : (executed & want1) != 0 && (executed & want2) != 0;
    if (hit) return true;
    if (!seen.insert(executed).second) return false;
    for (int id = 0; id < sim.n; ++id) {
        if (!sim.candidate(id, executed) || !sim.legal(id, executed, held)) continue;
        if (search_predicate(sim, executed | bit(id), sim.held_after(id, held), want1,
                             want2, seen))
            return true;
    }
    return false;
}

bool search_witness(const Sim& sim, Mask executed, std::uint32_t held, Mask want1,
                    Mask want2, std::unordered_set<Mask>& seen, std::vector<int>& order) {
    bool hit = (want1 == want2)
                   ? std::popcount(executed & want1) >= 2
                   : (executed & want1) != 0 && (executed & want2) != 0;
    if (hit) return true;
    if (!seen.insert(executed).second) return false;
    for (int id = 0; id < sim.n; ++id) {
        if (!sim.candidate(id, executed) || !sim.legal(id, executed, held)) continue;
        order.push_back(id);
        if (search_witness(sim, executed | bit(id), sim.held_after(id, held), want1,
                           want2, seen, order))
            return true;
        order.pop_back();
    }
    return false;
}

void enumerate_all(const Sim& sim, Mask executed, std::uint32_t held,
                   std::vector<int>& order, std::vector<Schedule>& out) {
    bool moved = false;
    for (int id = 0; id < sim.n; ++id) {
        if (!sim.candidate(id, executed) || !sim.legal(id, executed, held)) continue;
        moved = true;
        order.push_back(id);
        enumerate_all(sim, executed | bit(id), sim.held_after(id, held), order, out);
        order.pop_back();
    }
    if (!moved) {
        Schedule s;
        s.steps.reserve(order.size());
        for (int id : order) s.steps.push_back(sim.ix.addresses[id]);
        out.push_back(std::move(s));
    }
}

/// Per-thread lock set at the thread's leaf (its final acquisitions).
std::vector<std::uint32_t> final_held_per_thread(const TreeIndex& ix) {
    std::vector<std::uint32_t> out(ix.thread_spine.size(), 0);
    for (std::size_t th = 0; th < ix.thread_spine.size(); ++th) {
        std::uint32_t held = 0;
        for (int id : ix.thread_spine[th]) {
            const Node& n = *ix.nodes[id];
            if (n.kind == Kind::Acquire) held |= 1u << n.lock;
            if (n.kind == Kind::Release) held &= ~(1u << n.lock);
        }
        out[th] = held;
    }
    return out;
}

bool subtree_has_nonterminating_leaf(const TreeIndex& ix, int root) {
    for (std::size_t th = 0; th < ix.thread_leaf.size(); ++th) {
        int leaf = ix.thread_leaf[th];
        // leaf inside root's subtree?
        int cur = leaf;
        while (cur >= 0 && cur != root) cur = ix.parent[cur];
        if (cur == root && ix.nodes[leaf]->kind != Kind::Terminate) return true;
    }
    return false;
}

/// Does the subtree rooted at `start` need lock x to make progress, with
/// every spawned generation guarded by a later join on its parent's spine?
bool depends_on_lock(const TreeIndex& ix, int start, int x) {
    int th = ix.thread_of[start];
    const auto& spine = ix.thread_spine[th];
    auto begin = std::find(spine.begin(), spine.end(), start);
    for (auto it = begin; it != spine.end(); ++it) {
        const Node& n = *ix.nodes[*it];
        if (n.kind == Kind::Acquire && n.lock == x) return true;
        if (n.kind == Kind::Spawn) {
            bool joined_later = std::any_of(it + 1, spine.end(), [&](int id) {
                return ix.nodes[id]->kind == Kind::Join;
            });
            if (joined_later && depends_on_lock(ix, ix.children[*it][1], x)) return true;
        }
    }
    return false;
}

bool property_dfa(const TreeIndex& ix, int x) {
    auto held = final_held_per_thread(ix);
    int count = 0;
    for (std::uint32_t h : held)
        if (h & (1u << x)) ++count;
    return count >= 2;
}

bool property_child_term(const TreeIndex& ix) {
    for (std::size_t th = 0; th < ix.thread_spine.size(); ++th) {
        const auto& spine = ix.thread_spine[th];
        bool join_seen_ahead = false;
        // scan backwards: a spawn counts if some join follows it on the spine
        for (auto it = spine.rbegin(); it != spine.rend(); ++it) {
            const Node& n = *ix.nodes[*it];
            if (n.kind == Kind::Join) join_seen_ahead = true;
            if (n.kind == Kind::Spawn && join_seen_ahead &&
                subtree_has_nonterminating_leaf(ix, ix.children[*it][1]))
                return true;
        }
    }
    return false;
}

bool property_join_lock(const TreeIndex& ix, int x) {
    for (std::size_t th = 0; th < ix.thread_spine.size(); ++th) {
        const auto& spine = ix.thread_spine[th];
        for (std::size_t i = 0; i < spine.size(); ++i) {
            const Node& a = *ix.nodes[spine[i]];
            if (a.kind != Kind::Acquire || a.lock != x) continue;
            // look for acq_x ... sp ... jo with no rel_x in between
            for (std::size_t j = i + 1; j < spine.size(); ++j) {
                const Node& m = *ix.nodes[spine[j]];
                if (m.kind == Kind::Release && m.lock == x) break;
                if (m.kind != Kind::Spawn) continue;
                bool join_after = false;
                for (std::size_t l = j + 1; l < spine.size(); ++l) {
                    const Node& e = *ix.nodes[spine[l]];
                    if (e.kind == Kind::Release && e.lock == x) break;
                    if (e.kind == Kind::Join) {
                        join_after = true;
                        break;
                    }
                }
                if (join_after && depends_on_lock(ix, ix.children[spine[j]][1], x))
                    return true;
            }
        }
    }
    return false;
}

}  // namespace

std::string schedule_to_string(const Schedule& s) {
    std::string out;
    for (std::size_t i = 0; i < s.steps.size(); ++i) {
        if (i) out += ' ';
        out += address_to_string(s.steps[i]);
    }
    return out;
}

std::vector<Schedule> enumerate_schedules(const Node& t, int lock_count) {
    if (contains_br(t)) throw std::invalid_argument("tree contains br nodes");
    Sim sim(t, lock_count);
    std::vector<Schedule> out;
    std::vector<int> order;
    enumerate_all(sim, 0, 0, order, out);
    return out;
}

bool is_schedulable(const Node& t, int lock_count) {
    if (contains_br(t)) throw std::invalid_argument("tree contains br nodes");
    Sim sim(t, lock_count);
    std::unordered_map<Mask, bool> memo;
    return search_complete(sim, 0, 0, memo);
}

bool oracle_pairwise_reachable(const Node& t, int lock_count, const std::string& l1,
                               const std::string& l2) {
    if (contains_br(t)) throw std::invalid_argument("tree contains br nodes");
    Sim sim(t, lock_count);
    Mask m1 = sim.label_mask(l1), m2 = sim.label_mask(l2);
    if (m1 == 0) throw std::invalid_argument("label '" + l1 + "' absent from tree");
    if (m2 == 0) throw std::invalid_argument("label '" + l2 + "' absent from tree");
    std::unordered_set<Mask> seen;
    return search_predicate(sim, 0, 0, m1, m2, seen);
}

std::optional<Schedule> reachability_witness(const Node& t, int lock_count,
                                             const std::string& l1,
                                             const std::string& l2) {
    if (contains_br(t)) throw std::invalid_argument("tree contains br nodes");
    Sim sim(t, lock_count);
    Mask m1 = sim.label_mask(l1), m2 = sim.label_mask(l2);
    if (m1 == 0 || m2 == 0) return std::nullopt;
    std::unordered_set<Mask> seen;
    std::vector<int> order;
    if (!search_witness(sim, 0, 0, m1, m2, seen, order)) return std::nullopt;
    Schedule s;
    for (int id : order) s.steps.push_back(sim.ix.addresses[id]);
    return s;
}

bool oracle_property(const Node& t, int lock_count, Property p, int lock) {
    if (contains_br(t)) throw std::invalid_argument("tree contains br nodes");
    if (p == Property::AllDeadlock) return !is_schedulable(t, lock_count);
    TreeIndex ix(t);
    switch (p) {
        case Property::DoubleFinalAcquisition: return property_dfa(ix, lock);
        case Property::ChildTermination: return property_child_term(ix);
        case Property::JoinLock: return property_join_lock(ix, lock);
        default: return false;
    }
}

bool validate_schedule(const Node& t, int lock_count, const Schedule& s) {
    if (contains_br(t)) return false;
    Sim sim(t, lock_count);
    Mask executed = 0;
    std::uint32_t held = 0;
    for (const NodeAddress& a : s.steps) {
        int id;
        try {
            id = sim.ix.id_of(a);
        } catch (const std::out_of_range&) {
            return false;
        }
        if (!sim.candidate(id, executed)) return false;  // duplicate or parent missing
        if (!sim.legal(id, executed, held)) return false;
        if (sim.ix.nodes[id]->kind == Kind::Release &&
            (held & (1u << sim.ix.nodes[id]->lock)) == 0)
            return false;
        executed |= bit(id);
        held = sim.held_after(id, held);
    }
    return true;
}

}  // namespace atab
