#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "derand/report.hpp"

using nlohmann::json;

namespace {

std::string flag_name(std::string s) {
    for (auto& ch : s)
        if (ch == '_') ch = '-';
    return "--" + s;
}

// Raw flag values; converted to typed JSON once the chosen subcommand is known.
struct Leaf {
    std::string command;
    CLI::App* app = nullptr;
    std::map<std::string, std::optional<std::string>> scalars;
    std::map<std::string, bool> flags;
    std::map<std::string, std::vector<int>> arrays;
    std::string config;
};

void add_leaf(CLI::App& parent, const std::string& name, const std::string& command, const std::string& about,
              std::vector<Leaf>& leaves) {
    Leaf& leaf = leaves.emplace_back();
    leaf.command = command;
    leaf.app = parent.add_subcommand(name, about);
    leaf.app->add_option("--config", leaf.config, "JSON config; its values override flags");
    for (const auto& p : derand::param_info(command)) {
        const std::string desc = p.kind + (p.def.is_null() ? "" : ", default " + p.def.dump()) + (p.required ? ", required" : "");
        if (p.kind == "bool") {
            leaf.app->add_flag(flag_name(p.name), leaf.flags[p.name], desc);
        } else if (p.kind == "int_array") {
            leaf.app->add_option(flag_name(p.name), leaf.arrays[p.name], desc);
        } else if (p.name == "graph") {
            leaf.app->add_option("graph", leaf.scalars[p.name], "graph file written by `graph build --out`");
        } else {
            leaf.app->add_option(flag_name(p.name), leaf.scalars[p.name], desc);
        }
    }
}

json leaf_params(const Leaf& leaf) {
    json out = json::object();
    for (const auto& p : derand::param_info(leaf.command)) {
        if (p.kind == "bool") {
            if (leaf.flags.at(p.name)) out[p.name] = true;
        } else if (p.kind == "int_array") {
            if (leaf.app->count(flag_name(p.name)) > 0) out[p.name] = leaf.arrays.at(p.name);
        } else if (const auto& v = leaf.scalars.at(p.name); v) {
            if (p.kind == "string") {
                out[p.name] = *v;
            } else {
                try {
                    out[p.name] = json::parse(*v);
                } catch (const json::parse_error&) {
                    throw derand::UsageError("value of " + flag_name(p.name) + " is not a valid " + p.kind);
                }
            }
        }
    }
    if (!leaf.config.empty()) {
        const json overrides = derand::load_config_params(leaf.config, leaf.command);
        if (!overrides.is_object()) throw derand::UsageError("config params must be a JSON object");
        for (const auto& [k, v] : overrides.items()) out[k] = v;
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw derand::UsageError("cannot write '" + path + "'");
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"derand: generators, short-code graphs and lifted SDP solutions, with exact audits"};
    app.require_subcommand(1);
    std::vector<Leaf> leaves;
    leaves.reserve(16);

    auto* prg = app.add_subcommand("prg", "pseudorandom generator");
    prg->require_subcommand(1);
    add_leaf(*prg, "sample", "prg sample", "evaluate the generator on one seed", leaves);
    add_leaf(app, "fool", "fool", "Lipschitz fooling error of a polynomial", leaves);
    auto* graph = app.add_subcommand("graph", "short-code graphs");
    graph->require_subcommand(1);
    add_leaf(*graph, "build", "graph build", "build the Cayley graph on RM(n, d)", leaves);
    add_leaf(*graph, "audit", "graph audit", "spectrum audit", leaves);
    add_leaf(*graph, "fold", "graph fold", "fold under affine shifts", leaves);
    add_leaf(*graph, "cut", "graph cut", "balanced separator of the folded graph", leaves);
    add_leaf(app, "gap", "gap", "lifted SDP solution against the integral separator", leaves);
    add_leaf(app, "audit-all", "audit-all", "run every finite verification", leaves);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const Leaf* leaf = nullptr;
    for (const auto& l : leaves)
        if (l.app->parsed()) leaf = &l;
    if (leaf == nullptr) {
        std::cerr << "error: no command given\n";
        return 2;
    }

    try {
        derand::RunConfig cfg{leaf->command, leaf_params(*leaf)};
        const auto result = derand::run(cfg);
        const std::string text = result.report.dump(2) + "\n";
        const auto& out = result.report["config"]["params"]["out"];
        if (out.is_string()) write_file(out.get<std::string>(), text);
        else std::cout << text;
        for (const auto& s : result.sidecars) write_file(s.path, s.content);
        if (result.exit_code != 0) {
            std::cerr << "invariant failure:";
            for (const auto& id : result.failing) std::cerr << ' ' << id;
            std::cerr << '\n';
        }
        return result.exit_code;
    } catch (const derand::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }
}
