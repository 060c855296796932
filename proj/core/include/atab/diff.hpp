#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

#include "atab/tree.hpp"

namespace atab {

/// Calls fn for every join-lock-well-formed source tree over the
/// configuration's alphabet with at most max_nodes nodes, in a fixed
/// deterministic order. Labels are generated in both arities (as leaves
/// and over a continuation); lock discipline is enforced per thread
/// during generation, so exactly the well-formed trees are produced.
void for_each_source_tree(const CheckConfig& config, int max_nodes,
                          const std::function<void(const Node&)>& fn);

struct DiffResult {
    std::uint64_t trees = 0;         ///< forests compared
    std::uint64_t skipped = 0;       ///< trees some configured pair cannot crop
    std::uint64_t constituents = 0;  ///< constituent comparisons (repeats counted once)
    std::uint64_t disagreements = 0;
    std::string first_disagreement;  ///< detail of the first mismatch, if any
};

/// The flagship cross-validation: for every generated source tree, compare,
/// constituent by constituent, the automaton's verdict with the scheduling
/// oracle's "not (schedulable and pairwise reachable)". Operator-cropped
/// forest copies repeat the other label crops verbatim, so each distinct
/// constituent is compared once per source tree. Every ~thousandth tree
/// additionally builds the forest and checks that the lifted spine verdict
/// equals the conjunction of constituent verdicts. Progress lines and the
/// final summary are written to log.
DiffResult oracle_diff(const CheckConfig& config, int max_nodes, std::ostream& log);

}  // namespace atab
