#include "atab/report.hpp"

#include <sstream>

#include "atab/ata.hpp"
#include "atab/builders.hpp"

namespace atab {

namespace {

/// Number of leaves carrying label l.
int count_label_leaves(const Node& n, const std::string& l) {
    if (n.kind == Kind::Label && n.children.empty() && n.label == l) return 1;
    int total = 0;
    for (const Node& c : n.children) total += count_label_leaves(c, l);
    return total;
}

}  // namespace

ForestReport analyze_forest(const Forest& f, const CheckConfig& config) {
    config.validate();
    Ata full = build_full(config);

    // The individual widgets, in reporting order.
    struct Probe {
        Ata ata;
        std::string reason;
    };
    std::vector<Probe> probes;
    for (int x = 1; x <= config.lock_count; ++x)
        probes.push_back({build_dfa(x, config),
                          "double final acquisition (lock " + std::to_string(x) + ")"});
    for (int x = 1; x <= config.lock_count; ++x)
        probes.push_back({build_join_lock(x, config),
                          "join-lock deadlock (lock " + std::to_string(x) + ")"});
    probes.push_back(
        {build_child_term(config), "join deadlock: spawned thread never terminates"});
    if (config.lock_count >= 1)
        probes.push_back({build_cycle_check(config), "lock dependency cycle"});

    ForestReport report;
    for (std::size_t i = 0; i < f.trees.size(); ++i) {
        const Node& c = f.trees[i];
        ConstituentReport cr;
        cr.safe = evaluate(full, c).accepted;
        cr.reason.clear();
        for (const Probe& p : probes)
            if (evaluate(p.ata, c).accepted) {
                cr.reason = p.reason;
                break;
            }
        if (cr.reason.empty()) {
            if (cr.safe)
                cr.reason = config.pairs.empty() ? "no label pairs requested"
                                                 : "labels not jointly reachable";
            else
                cr.reason = "schedulable and labels jointly reachable";
        }
        if (!cr.safe && !report.unsafe_index) report.unsafe_index = i;
        report.constituents.push_back(std::move(cr));
    }

    report.safe = evaluate(full, f.spine).accepted;

    if (report.unsafe_index) {
        const std::size_t i = *report.unsafe_index;
        const ConstituentInfo& info = f.info[i];
        if (info.pair_index) {
            const auto& [l1, l2] = config.pairs[*info.pair_index];
            const Node& c = f.trees[i];
            int n1 = count_label_leaves(c, l1), n2 = count_label_leaves(c, l2);
            bool present = l1 == l2 ? n1 >= 2 : (n1 >= 1 && n2 >= 1);
            if (present) report.witness = reachability_witness(c, config.lock_count, l1, l2);
        }
    }
    return report;
}

std::string format_report(const ForestReport& report, const Forest& f,
                          const CheckConfig& config) {
    std::ostringstream out;
    out << (report.safe ? "SAFE" : "UNSAFE") << '\n';
    for (std::size_t i = 0; i < report.constituents.size(); ++i) {
        const ConstituentReport& cr = report.constituents[i];
        const ConstituentInfo& info = f.info[i];
        out << "constituent " << i + 1 << " [";
        if (info.pair_index) {
            const auto& [l1, l2] = config.pairs[*info.pair_index];
            out << "pair (" << l1 << "," << l2 << ") checks "
                << address_to_string(info.check1) << '/'
                << address_to_string(info.check2);
        } else {
            out << "no pairs";
        }
        if (info.op_crop)
            out << ", operator crop at " << address_to_string(*info.op_crop);
        out << "]: " << (cr.safe ? "safe" : "UNSAFE") << " - " << cr.reason << '\n';
    }
    if (!report.safe) {
        if (report.witness)
            out << "witness schedule: " << schedule_to_string(*report.witness) << '\n';
        else
            out << "witness schedule: none found by the scheduling oracle\n";
    }
    return out.str();
}

}  // namespace atab
