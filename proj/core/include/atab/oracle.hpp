// oracle.hpp -- brute-force scheduling ground truth
//
// Enumerates well-formed action sequences (schedules) of a finite action
// tree by explicit state-space search and decides schedulability, pairwise
// label reachability, and the structural deadlock properties the automata
// are supposed to capture. Deliberately simple; meant for desk-scale trees.

#ifndef ATAB_ORACLE_HPP
#define ATAB_ORACLE_HPP

#include <optional>
#include <string>
#include <vector>

#include "atab/tree.hpp"

namespace atab {

/// A schedule: node addresses in execution order. Well-formed means all
/// distinct, ancestors before descendants, ancestor-closed, and each step
/// legal with respect to locks and joins.
struct Schedule {
    std::vector<NodeAddress> steps;
};

std::string schedule_to_string(const Schedule& s);

/// All maximal well-formed schedules, emitted in lexicographic order of
/// their address sequences. A maximal schedule either covers every node or
/// stalls in a state where no thread can act. Exponential; use only on
/// small trees. Throws std::invalid_argument on br nodes or trees that are
/// not join-lock-well-formed.
std::vector<Schedule> enumerate_schedules(const Node& t, int lock_count);

/// True iff some schedule covers every node of the tree. Memoized search;
/// comfortably handles ~20-node trees.
bool is_schedulable(const Node& t, int lock_count);

/// True iff some well-formed schedule (complete or not) executes both a
/// label-l1 leaf and a distinct label-l2 leaf: the two check points are
/// jointly reachable. Labels must occur as leaves (cropped form); throws if
/// either label is absent.
bool oracle_pairwise_reachable(const Node& t, int lock_count,
                               const std::string& l1, const std::string& l2);

/// Lexicographically first well-formed schedule that executes both label
/// leaves, or nullopt if none exists.
std::optional<Schedule> reachability_witness(const Node& t, int lock_count,
                                             const std::string& l1,
                                             const std::string& l2);

enum class Property {
    DoubleFinalAcquisition,  ///< two threads end still holding lock x
    ChildTermination,        ///< a joined subtree contains a never-terminating thread
    JoinLock,                ///< acq_x before a spawn whose child needs x, join before rel_x
    AllDeadlock,             ///< no complete schedule exists
};

/// Structural/scheduling ground truth for the widget properties. `lock` is
/// the x parameter for DoubleFinalAcquisition and JoinLock (ignored
/// otherwise).
bool oracle_property(const Node& t, int lock_count, Property p, int lock = 0);

/// Independent validator: replays `s` with a fresh scheduler state and
/// checks every well-formedness condition. Used by the tests to audit the
/// enumerator's output.
bool validate_schedule(const Node& t, int lock_count, const Schedule& s);

}  // namespace atab

#endif  // ATAB_ORACLE_HPP
