#include "atab/forest.hpp"

#include <algorithm>
#include <stdexcept>

namespace atab {

namespace {

/// Rebuilds t with the two chosen label nodes truncated to arity-0 label
/// leaves and every other label node removed (unary labels spliced out,
/// leaf labels turned into bot).
Node crop_rebuild(const Node& n, NodeAddress& cur, const NodeAddress& a1,
                  const NodeAddress& a2) {
    if (cur == a1 || cur == a2) return label_leaf(n.label);
    if (n.kind == Kind::Label) {
        if (n.children.empty()) return stop_leaf();
        cur.push_back(1);
        Node spliced = crop_rebuild(n.children[0], cur, a1, a2);
        cur.pop_back();
        return spliced;
    }
    Node out = n;
    out.children.clear();
    for (std::size_t i = 0; i < n.children.size(); ++i) {
        cur.push_back(static_cast<int>(i) + 1);
        out.children.push_back(crop_rebuild(n.children[i], cur, a1, a2));
        cur.pop_back();
    }
    return out;
}

Node replace_with_bot(const Node& n, NodeAddress& cur, const NodeAddress& target) {
    if (cur == target) return stop_leaf();
    Node out = n;
    out.children.clear();
    for (std::size_t i = 0; i < n.children.size(); ++i) {
        cur.push_back(static_cast<int>(i) + 1);
        out.children.push_back(replace_with_bot(n.children[i], cur, target));
        cur.pop_back();
    }
    return out;
}

void collect_operators(const Node& n, NodeAddress& cur, std::vector<NodeAddress>& out) {
    if (n.kind == Kind::Acquire || n.kind == Kind::Release || n.kind == Kind::Join)
        out.push_back(cur);
    for (std::size_t i = 0; i < n.children.size(); ++i) {
        cur.push_back(static_cast<int>(i) + 1);
        collect_operators(n.children[i], cur, out);
        cur.pop_back();
    }
}

void collect_label_occurrences(const Node& n, NodeAddress& cur, const std::string& l,
                               std::set<NodeAddress>& out) {
    if (n.kind == Kind::Label && n.label == l) out.insert(cur);
    for (std::size_t i = 0; i < n.children.size(); ++i) {
        cur.push_back(static_cast<int>(i) + 1);
        collect_label_occurrences(n.children[i], cur, l, out);
        cur.pop_back();
    }
}

}  // namespace

std::vector<Node> crop_label(const Node& t, const std::set<NodeAddress>& p1,
                             const std::set<NodeAddress>& p2) {
    for (const auto& set : {p1, p2})
        for (const NodeAddress& a : set)
            if (node_at(t, a).kind != Kind::Label)
                throw std::invalid_argument("check point " + address_to_string(a) +
                                            " is not a label node");
    bool same_set = p1 == p2;
    std::vector<Node> out;
    for (const NodeAddress& a1 : p1)
        for (const NodeAddress& a2 : p2) {
            if (same_set && !(a1 < a2)) continue;
            if (descendant(t, a1, a2) || descendant(t, a2, a1)) continue;
            NodeAddress cur;
            out.push_back(crop_rebuild(t, cur, a1, a2));
        }
    return out;
}

std::vector<Node> crop_operator(const Node& t) {
    std::vector<NodeAddress> ops;
    NodeAddress cur;
    collect_operators(t, cur, ops);
    std::vector<Node> out;
    out.reserve(ops.size());
    for (const NodeAddress& a : ops) {
        NodeAddress walk;
        out.push_back(replace_with_bot(t, walk, a));
    }
    return out;
}

Node br_join(const std::vector<Node>& trees) {
    if (trees.empty()) throw std::invalid_argument("br_join needs at least one tree");
    Node out = trees.back();
    for (std::size_t i = trees.size() - 1; i-- > 0;) out = br(trees[i], out);
    return out;
}

std::vector<Node> flatten_br(const Node& t) {
    if (t.kind != Kind::Br) return {t};
    std::vector<Node> out = flatten_br(t.children[0]);
    std::vector<Node> rest = flatten_br(t.children[1]);
    out.insert(out.end(), std::make_move_iterator(rest.begin()),
               std::make_move_iterator(rest.end()));
    return out;
}

Forest build_forest(const Node& t, const CheckConfig& config) {
    config.validate();
    if (contains_br(t))
        throw std::invalid_argument("source tree must not contain br nodes");
    if (!is_join_lock_well_formed(t, config.lock_count))
        throw std::invalid_argument("source tree is not join-lock-well-formed");

    // Label-crop layer: for each configured pair, one constituent per valid
    // occurrence pair, in configuration order.
    std::vector<Node> label_crops;
    std::vector<ConstituentInfo> label_info;
    for (std::size_t pi = 0; pi < config.pairs.size(); ++pi) {
        const auto& [l1, l2] = config.pairs[pi];
        std::set<NodeAddress> occ1, occ2;
        NodeAddress cur;
        collect_label_occurrences(t, cur, l1, occ1);
        collect_label_occurrences(t, cur, l2, occ2);
        if (occ1.empty())
            throw std::invalid_argument("label '" + l1 + "' has no occurrence");
        if (occ2.empty())
            throw std::invalid_argument("label '" + l2 + "' has no occurrence");
        bool same = l1 == l2;
        std::size_t before = label_crops.size();
        for (const NodeAddress& a1 : occ1)
            for (const NodeAddress& a2 : occ2) {
                if (same && !(a1 < a2)) continue;
                if (descendant(t, a1, a2) || descendant(t, a2, a1)) continue;
                NodeAddress walk;
                label_crops.push_back(crop_rebuild(t, walk, a1, a2));
                label_info.push_back({pi, a1, a2, std::nullopt});
            }
        if (label_crops.size() == before)
            throw std::invalid_argument("pair (" + l1 + "," + l2 +
                                        ") produces no cropped tree");
    }

    // With no pairs configured the label layer is the source itself, with
    // every label removed (there are no check points to keep).
    if (config.pairs.empty()) {
        NodeAddress walk;
        NodeAddress nowhere{0};  // unreachable address: crop nothing, splice all
        label_crops.push_back(crop_rebuild(t, walk, nowhere, nowhere));
        label_info.push_back({std::nullopt, {}, {}, std::nullopt});
    }

    Node base = br_join(label_crops);

    std::vector<NodeAddress> ops;
    NodeAddress cur;
    collect_operators(base, cur, ops);

    Forest f;
    for (const NodeAddress& op : ops) {
        NodeAddress walk;
        Node copy = replace_with_bot(base, walk, op);
        std::vector<Node> parts = flatten_br(copy);
        for (std::size_t i = 0; i < parts.size(); ++i) {
            ConstituentInfo ci = label_info[i];
            ci.op_crop = op;
            f.trees.push_back(std::move(parts[i]));
            f.info.push_back(std::move(ci));
        }
    }
    for (std::size_t i = 0; i < label_crops.size(); ++i) {
        f.trees.push_back(label_crops[i]);
        f.info.push_back(label_info[i]);
    }
    f.spine = br_join(f.trees);
    return f;
}

}  // namespace atab
