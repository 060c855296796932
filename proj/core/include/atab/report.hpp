#pragma once

#include <optional>
#include <string>
#include <vector>

#include "atab/forest.hpp"
#include "atab/oracle.hpp"
#include "atab/tree.hpp"

namespace atab {

/// Verdict for one forest constituent, with the first widget that fired
/// (checked in the order: double final acquisition, join-lock, child
/// termination, dependency cycle, pair reachability) spelled out.
struct ConstituentReport {
    bool safe = true;
    std::string reason;
};

struct ForestReport {
    bool safe = true;
    std::vector<ConstituentReport> constituents;  ///< parallel to Forest::trees
    /// For an unsafe forest: the first rejected constituent and, when the
    /// scheduling oracle confirms the reachability, a witness schedule of
    /// that constituent.
    std::optional<std::size_t> unsafe_index;
    std::optional<Schedule> witness;
};

/// Runs the full automaton over every constituent and, for the unsafe
/// case, asks the scheduling oracle for a witness schedule.
ForestReport analyze_forest(const Forest& f, const CheckConfig& config);

/// Multi-line human-readable rendering: overall verdict, one line per
/// constituent with its origin info, and the witness schedule if any.
std::string format_report(const ForestReport& report, const Forest& f,
                          const CheckConfig& config);

}  // namespace atab
