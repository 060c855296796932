#include "atab/diff.hpp"

#include <algorithm>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "atab/ata.hpp"
#include "atab/builders.hpp"
#include "atab/forest.hpp"
#include "atab/oracle.hpp"

namespace atab {

namespace {

using Sink = std::function<void(Node)>;

/// Emits every well-formed tree with exactly n nodes, given the lock
/// stack of the current thread. Spawned threads start with a fresh stack.
void gen(int n, std::vector<int>& stack, const CheckConfig& cfg, const Sink& sink) {
    if (n < 1) return;
    if (n == 1) {
        if (stack.empty()) sink(terminate_leaf());
        sink(stop_leaf());
        for (const std::string& l : cfg.labels) sink(label_leaf(l));
        return;
    }

    std::vector<int>& st = stack;
    gen(n - 1, st, cfg, [&](Node c) { sink(join(std::move(c))); });
    for (int i = 1; i <= cfg.lock_count; ++i) {
        if (std::find(st.begin(), st.end(), i) != st.end()) continue;
        st.push_back(i);
        gen(n - 1, st, cfg, [&](Node c) { sink(acquire(i, std::move(c))); });
        st.pop_back();
    }
    if (!st.empty()) {
        int i = st.back();
        st.pop_back();
        gen(n - 1, st, cfg, [&](Node c) { sink(release(i, std::move(c))); });
        st.push_back(i);
    }
    for (const std::string& l : cfg.labels)
        gen(n - 1, st, cfg, [&](Node c) { sink(label_over(l, std::move(c))); });

    for (int left = 1; left <= n - 2; ++left) {
        gen(left, st, cfg, [&](Node lt) {
            std::vector<int> fresh;
            gen(n - 1 - left, fresh, cfg, [&](Node rt) {
                sink(spawn(lt, std::move(rt)));  // lt copied per right subtree
            });
        });
    }
}

/// Oracle ground truth for one constituent: safe unless it is schedulable
/// and its configured label pair is jointly reachable.
bool oracle_safe(const Node& c, const CheckConfig& cfg,
                 const std::optional<std::size_t>& pair_index) {
    if (!pair_index) return true;  // nothing asked, nothing reachable
    const auto& [l1, l2] = cfg.pairs[*pair_index];
    int n1 = 0, n2 = 0;
    std::vector<const Node*> todo{&c};
    while (!todo.empty()) {
        const Node* n = todo.back();
        todo.pop_back();
        if (n->kind == Kind::Label && n->children.empty()) {
            if (n->label == l1) ++n1;
            if (n->label == l2) ++n2;
        }
        for (const Node& ch : n->children) todo.push_back(&ch);
    }
    bool present = l1 == l2 ? n1 >= 2 : (n1 >= 1 && n2 >= 1);
    if (!present) return true;
    if (!is_schedulable(c, cfg.lock_count)) return true;
    return !oracle_pairwise_reachable(c, cfg.lock_count, l1, l2);
}

/// Transparent hashing so cache lookups can reuse one key buffer.
struct KeyHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
        return std::hash<std::string_view>{}(s);
    }
};

/// Records the address of every label node whose name has a slot in occ.
void collect_pair_labels(const Node& n, NodeAddress& cur,
                         std::unordered_map<std::string, std::set<NodeAddress>>& occ) {
    if (n.kind == Kind::Label) {
        auto it = occ.find(n.label);
        if (it != occ.end()) it->second.insert(cur);
    }
    for (std::size_t i = 0; i < n.children.size(); ++i) {
        cur.push_back(static_cast<int>(i) + 1);
        collect_pair_labels(n.children[i], cur, occ);
        cur.pop_back();
    }
}

}  // namespace

void for_each_source_tree(const CheckConfig& config, int max_nodes,
                          const std::function<void(const Node&)>& fn) {
    config.validate();
    std::vector<int> stack;
    for (int n = 1; n <= max_nodes; ++n)
        gen(n, stack, config, [&](Node t) { fn(t); });
}

DiffResult oracle_diff(const CheckConfig& config, int max_nodes, std::ostream& log) {
    CheckConfig cfg = config;
    cfg.label_mode = LabelMode::Source;
    cfg.validate();

    Ata full = build_full(cfg);
    DiffResult r;

    // Verdict cache per (pair, constituent): bit 0 = automaton safe,
    // bit 1 = oracle safe. Small constituents recur across source trees,
    // so nearly every lookup is a hit; the key buffer is reused and looked
    // up as a string_view to keep hits allocation-free.
    std::unordered_map<std::string, unsigned char, KeyHash, std::equal_to<>> cache;
    std::string key;
    std::uint64_t emitted = 0;

    // Compares one constituent against the oracle; returns the automaton
    // verdict so the caller can fold the forest conjunction.
    auto check = [&](const Node& c, const std::optional<std::size_t>& pair_index,
                     const Node& source) {
        ++r.constituents;
        key.clear();
        if (pair_index)
            key += std::to_string(*pair_index);
        else
            key += '-';
        key += '|';
        serialize_tree(c, key);
        auto it = cache.find(std::string_view(key));
        if (it == cache.end()) {
            bool a = evaluate(full, c).accepted;
            bool o = oracle_safe(c, cfg, pair_index);
            it = cache.emplace(key, static_cast<unsigned char>((a ? 1 : 0) | (o ? 2 : 0)))
                     .first;
        }
        bool a = (it->second & 1) != 0, o = (it->second & 2) != 0;
        if (a != o) {
            if (r.disagreements == 0) {
                std::ostringstream d;
                d << "tree: " << serialize_tree(source) << '\n' << "constituent";
                if (pair_index) d << " for pair " << *pair_index + 1;
                d << ": " << serialize_tree(c) << '\n'
                  << "automaton says " << (a ? "safe" : "unsafe") << ", oracle says "
                  << (o ? "safe" : "unsafe");
                r.first_disagreement = d.str();
                log << "DISAGREEMENT\n" << r.first_disagreement << '\n';
            }
            ++r.disagreements;
        }
        return a;
    };

    // Occurrence slots for exactly the labels the pairs mention.
    std::unordered_map<std::string, std::set<NodeAddress>> occ;
    for (const auto& [l1, l2] : cfg.pairs) {
        occ.emplace(l1, std::set<NodeAddress>{});
        occ.emplace(l2, std::set<NodeAddress>{});
    }

    for_each_source_tree(cfg, max_nodes, [&](const Node& t) {
        // The forest repeats every label crop once per operator copy; the
        // repeats are verbatim duplicates, so comparing each label crop and
        // its operator-cropped variants once covers every constituent.
        std::vector<std::pair<std::size_t, Node>> crops;
        if (!cfg.pairs.empty()) {
            for (auto& [l, s] : occ) s.clear();
            NodeAddress cur;
            collect_pair_labels(t, cur, occ);
            for (std::size_t pi = 0; pi < cfg.pairs.size(); ++pi) {
                const auto& [l1, l2] = cfg.pairs[pi];
                std::vector<Node> layer = crop_label(t, occ.at(l1), occ.at(l2));
                if (layer.empty()) {
                    ++r.skipped;  // a label is missing or only nested occurrences
                    return;
                }
                for (Node& c : layer) crops.emplace_back(pi, std::move(c));
            }
        }
        ++r.trees;

        bool all_safe = true;
        if (cfg.pairs.empty()) {
            Forest f = build_forest(t, cfg);  // just the cleaned source + op crops
            for (std::size_t i = 0; i < f.trees.size(); ++i)
                all_safe = check(f.trees[i], f.info[i].pair_index, t) && all_safe;
        } else {
            for (const auto& [pi, c] : crops) {
                for (const Node& part : crop_operator(c))
                    all_safe = check(part, pi, t) && all_safe;
                all_safe = check(c, pi, t) && all_safe;
            }
        }

        // Spot-check the br lift: spine verdict == conjunction over parts.
        if (emitted++ % 997 == 0) {
            Forest f = build_forest(t, cfg);
            bool lifted = evaluate(full, f.spine).accepted;
            if (lifted != all_safe) {
                if (r.disagreements == 0) {
                    r.first_disagreement =
                        "tree: " + serialize_tree(t) +
                        "\nlifted spine verdict differs from the conjunction of "
                        "constituent verdicts";
                    log << "DISAGREEMENT\n" << r.first_disagreement << '\n';
                }
                ++r.disagreements;
            }
        }
        if (r.trees % 500000 == 0)
            log << "... " << r.trees << " trees compared\n";
    });

    log << "checked " << r.trees << " trees (" << r.skipped << " skipped, "
        << r.constituents << " constituent checks, " << cache.size()
        << " unique): " << r.disagreements << " disagreements\n";
    return r;
}

}  // namespace atab
