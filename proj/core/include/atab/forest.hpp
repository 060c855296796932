#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <vector>

#include "atab/tree.hpp"

namespace atab {

/// Where a forest constituent came from: the configured label pair and the
/// two chosen occurrence addresses (in the source tree), plus, for the
/// operator-cropped copies, the address (in the label-crop layer's spine)
/// of the concurrency operator that was replaced by bot. Constituents of
/// the uncropped final layer leave op_crop empty. When the configuration
/// has no pairs there is no label layer and pair_index is empty.
struct ConstituentInfo {
    std::optional<std::size_t> pair_index;
    NodeAddress check1;
    NodeAddress check2;
    std::optional<NodeAddress> op_crop;
};

/// An action-tree forest: the ordered list of constituent trees plus the
/// right-nested br spine that joins them. The spine nests to the right so
/// that the first child of every br node is a plain (br-free) constituent.
struct Forest {
    Node spine;
    std::vector<Node> trees;
    std::vector<ConstituentInfo> info;  ///< parallel to trees
};

/// One tree per valid occurrence pair (p1 x p2): both chosen nodes become
/// arity-0 label leaves and lose their subtrees. Pairs where one address
/// is a prefix of the other are skipped; when p1 and p2 are the same set,
/// only unordered pairs are kept. Every other label node is removed: a
/// unary label is spliced out (replaced by its child) and a leaf label
/// becomes bot. Chosen addresses must name label nodes.
std::vector<Node> crop_label(const Node& t, const std::set<NodeAddress>& p1,
                             const std::set<NodeAddress>& p2);

/// One tree per acquire/release/join occurrence, in preorder, with that
/// occurrence (and its subtree) replaced by bot.
std::vector<Node> crop_operator(const Node& t);

/// Right-nested binary br spine: [T1] -> T1, [T1,T2,T3] -> (br T1 (br T2 T3)).
Node br_join(const std::vector<Node>& trees);

/// Inverse of br_join: the ordered br-free constituents of a spine.
std::vector<Node> flatten_br(const Node& t);

/// Builds the full forest for a source tree: a label-crop layer per
/// configured pair, an operator-cropped copy of that layer per operator
/// occurrence, and the uncropped layer itself, all joined on one spine.
/// Throws when a configured pair produces no crop (a label is missing or
/// its only occurrences are prefix-related).
Forest build_forest(const Node& t, const CheckConfig& config);

}  // namespace atab
