#include "atab/cli.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "atab/ata.hpp"
#include "atab/builders.hpp"
#include "atab/diff.hpp"
#include "atab/forest.hpp"
#include "atab/report.hpp"
#include "atab/tree.hpp"

namespace atab {

namespace {

constexpr const char* kVersion = "1.0.0";

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

bool valid_label(const std::string& l) {
    if (l.empty() || !std::isalpha(static_cast<unsigned char>(l[0]))) return false;
    return std::all_of(l.begin(), l.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

struct ConfigFlags {
    int locks = 0;
    std::string labels;
    std::string pairs;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
    cmd->add_option("--locks", f.locks, "number of locks (lock ids 1..N)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--labels", f.labels, "comma-separated label names");
    cmd->add_option("--pairs", f.pairs,
                    "comma-separated label pairs to check, each as L1:L2");
}

CheckConfig load_config(const ConfigFlags& f) {
    CheckConfig cfg;
    cfg.lock_count = f.locks;
    cfg.label_mode = LabelMode::Source;
    if (!f.labels.empty()) {
        for (const std::string& l : split(f.labels, ',')) {
            if (!valid_label(l))
                throw std::invalid_argument("bad label name '" + l + "'");
            cfg.labels.push_back(l);
        }
    }
    if (!f.pairs.empty()) {
        for (const std::string& p : split(f.pairs, ',')) {
            std::vector<std::string> parts = split(p, ':');
            if (parts.size() != 2)
                throw std::invalid_argument("bad pair '" + p + "', expected L1:L2");
            cfg.pairs.emplace_back(parts[0], parts[1]);
        }
    }
    cfg.validate();
    return cfg;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text,
                  std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write '" + path + "'");
    f << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"alternating tree automata for join-lock action-tree checks"};
    app.require_subcommand(1);

    ConfigFlags build_cfg, check_cfg, forest_cfg, diff_cfg;
    std::string build_widget_id = "full", build_out;
    std::string check_tree, forest_tree, forest_out;
    int diff_max_nodes = 9;

    CLI::App* build = app.add_subcommand("build", "build a widget automaton");
    add_config_flags(build, build_cfg);
    build->add_option("--widget", build_widget_id,
                      "one of full, cycle, childterm, spawnpair, finalacq:X, dfa:X, "
                      "joinlock:X, depends:X:Y, pairreach:L1:L2");
    build->add_option("-o,--output", build_out, "output path (stdout if omitted)");

    CLI::App* check = app.add_subcommand(
        "check",
        "check a source tree; prints SAFE or UNSAFE with per-constituent "
        "verdicts (witness schedules come from the scheduling oracle)");
    add_config_flags(check, check_cfg);
    check->add_option("tree", check_tree, "path to the source tree")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* forest = app.add_subcommand("forest", "build and print the forest");
    add_config_flags(forest, forest_cfg);
    forest->add_option("tree", forest_tree, "path to the source tree")
        ->required()
        ->check(CLI::ExistingFile);
    forest->add_option("-o,--output", forest_out, "output path (stdout if omitted)");

    CLI::App* diff = app.add_subcommand(
        "oracle-diff", "exhaustively compare automaton verdicts with the oracle");
    add_config_flags(diff, diff_cfg);
    diff->add_option("--max-nodes", diff_max_nodes, "largest source tree size")
        ->check(CLI::Range(1, 12));

    CLI::App* version = app.add_subcommand("version", "print the version");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (version->parsed()) {
            out << "atab " << kVersion << '\n';
            return 0;
        }
        if (build->parsed()) {
            CheckConfig cfg = load_config(build_cfg);
            Ata a = build_widget(parse_widget_id(build_widget_id), cfg);
            write_output(build_out, serialize(a), out);
            return 0;
        }
        if (forest->parsed()) {
            CheckConfig cfg = load_config(forest_cfg);
            Node t = parse_tree(read_file(forest_tree), cfg);
            Forest f = build_forest(t, cfg);
            write_output(forest_out, serialize_tree(f.spine) + "\n", out);
            return 0;
        }
        if (check->parsed()) {
            CheckConfig cfg = load_config(check_cfg);
            Node t = parse_tree(read_file(check_tree), cfg);
            Forest f = build_forest(t, cfg);
            ForestReport report = analyze_forest(f, cfg);
            out << format_report(report, f, cfg);
            return report.safe ? 0 : 1;
        }
        if (diff->parsed()) {
            CheckConfig cfg = load_config(diff_cfg);
            DiffResult r = oracle_diff(cfg, diff_max_nodes, out);
            return r.disagreements == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    err << "error: no command\n";
    return 2;
}

}  // namespace atab
