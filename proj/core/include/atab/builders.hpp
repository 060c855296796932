#pragma once

#include <string>

#include "atab/ata.hpp"
#include "atab/tree.hpp"

namespace atab {

/// Names one of the generated automata, with its lock/label parameters.
struct WidgetId {
    enum class Kind {
        FinalAcq,
        SpawnPair,
        DoubleFinalAcq,
        ChildTerm,
        JoinLock,
        DependsOn,
        CycleCheck,
        PairReach,
        Full,
    };
    Kind kind = Kind::Full;
    int x = 0;
    int y = 0;
    std::string l1;
    std::string l2;
};

/// Parses the CLI spelling of a widget id: "full", "spawnpair", "childterm",
/// "cycle", "finalacq:X", "dfa:X", "joinlock:X", "depends:X:Y",
/// "pairreach:L1:L2". Throws std::invalid_argument on anything else.
WidgetId parse_widget_id(const std::string& text);
std::string widget_id_to_string(const WidgetId& id);

/// Accepts when every thread of the tree performs its own final
/// acquisition of lock x (an acquire it never releases).
Ata build_final_acq(int x, const CheckConfig& config);

/// Trees containing at least one spawn (searches for a separating spawn
/// whose two sides both terminate, where any subtree counts as such).
Ata build_spawn_pair(const CheckConfig& config);

/// Double final acquisition of lock x: two threads both end holding x.
Ata build_dfa(int x, const CheckConfig& config);

/// A join whose spawned child subtree contains a thread that never
/// terminates (ends in bot or a label instead of $).
Ata build_child_term(const CheckConfig& config);

/// A thread holding lock x spawns a child that needs x and joins it
/// before releasing x (every spawned generation join-guarded).
Ata build_join_lock(int x, const CheckConfig& config);

/// Lock x finally acquired with lock y acquired later below, directly or
/// through a chain of final acquisitions of intermediate locks.
Ata build_depends_on(int x, int y, const CheckConfig& config);

/// Some lock depends on itself: a self-dependence below one acquisition,
/// a nested dependency chain closing a cycle, or two sibling subtrees
/// depending on each other's finally-held locks.
Ata build_cycle_check(const CheckConfig& config);

/// Accepts when no spawn separates a leaf labeled l1 from a leaf labeled
/// l2 (rejection means the pair is jointly reachable, locks ignored).
Ata build_pair_reach(const std::string& l1, const std::string& l2,
                     const CheckConfig& config);

/// The complete checker: deadlock family (cycle, join-lock, double final
/// acquisition, child termination) disjoined with the conjunction of all
/// configured pair-reachability widgets, lifted over br spines.
/// Acceptance of a forest means it is safe.
Ata build_full(const CheckConfig& config);

Ata build_widget(const WidgetId& id, const CheckConfig& config);

}  // namespace atab
