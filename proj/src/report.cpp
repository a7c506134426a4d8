#include "derand/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "derand/audits.hpp"
#include "derand/clouds.hpp"
#include "derand/config.hpp"
#include "derand/errors.hpp"
#include "derand/fooling.hpp"
#include "derand/graph.hpp"
#include "derand/pseudorandom.hpp"
#include "derand/reed_muller.hpp"

namespace derand {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

enum class T { UInt, Int, Number, Bool, String, Object, IntArray };

struct ParamDef {
    const char* name;
    T type;
    json def;            // null: optional without default
    bool required = false;
};

const std::map<std::string, std::vector<ParamDef>>& param_table() {
    static const std::map<std::string, std::vector<ParamDef>> s = [] {
        const std::vector<ParamDef> generator{
            {"n", T::UInt, nullptr, true}, {"ell", T::Int, 1},        {"eps", T::Number, 0.5}, {"c", T::Number, 4.0},
            {"t", T::UInt, nullptr},       {"delta", T::Number, nullptr}, {"k_h", T::UInt, nullptr},
        };
        const std::vector<ParamDef> graph_source{{"graph", T::String, nullptr, true}};
        std::map<std::string, std::vector<ParamDef>> m;
        m["prg sample"] = generator;
        m["prg sample"].push_back({"seed_hex", T::String, nullptr, true});
        m["fool"] = generator;
        for (ParamDef p : std::vector<ParamDef>{{"poly", T::String, nullptr},
                                                  {"poly_inline", T::Object, nullptr},
                                                  {"exact", T::Bool, false},
                                                  {"samples", T::UInt, 0},
                                                  {"batches", T::Int, 20}})
            m["fool"].push_back(p);
        m["graph build"] = {{"n", T::Int, nullptr, true},   {"d", T::Int, nullptr, true},        {"eps", T::Number, 0.1},
                            {"filter", T::String, "auto"},  {"allow_wide_eps", T::Bool, false}, {"spectra_out", T::String, nullptr},
                            {"codewords_out", T::String, nullptr}};
        m["graph audit"] = graph_source;
        m["graph audit"].push_back({"delta", T::Number, 0.05});
        m["graph audit"].push_back({"spectra_out", T::String, nullptr});
        m["graph fold"] = graph_source;
        m["graph fold"].push_back({"cuts", T::Int, 10});
        m["graph cut"] = graph_source;
        for (ParamDef p : std::vector<ParamDef>{{"b", T::Number, 1.0 / 3}, {"brute_force_cap", T::Int, 24}, {"restarts", T::Int, 64}})
            m["graph cut"].push_back(p);
        m["gap"] = {{"n", T::Int, 4},
                    {"d", T::Int, 2},
                    {"eps", T::Number, 0.1},
                    {"b", T::Number, 1.0 / 3},
                    {"rounds", T::Int, 2},
                    {"tensor", T::Int, 3},
                    {"delta", T::Number, nullptr},
                    {"filter", T::String, "auto"},
                    {"allow_wide_eps", T::Bool, false},
                    {"brute_force_cap", T::Int, 24},
                    {"restarts", T::Int, 64},
                    {"gram_cap", T::Int, 256},
                    {"matching_pairs_cap", T::UInt, 100000}};
        m["audit-all"] = {{"only", T::IntArray, json::array()}, {"fooling_polynomials", T::Int, 50}, {"pruning_polynomials", T::Int, 100}};
        for (auto& [cmd, v] : m) {
            v.push_back({"rng_seed", T::UInt, 1});
            v.push_back({"out", T::String, nullptr});
        }
        return m;
    }();
    return s;
}

const std::vector<ParamDef>& defs_for(const std::string& command) {
    const auto it = param_table().find(command);
    if (it == param_table().end()) throw UsageError("unknown command '" + command + "'");
    return it->second;
}

bool type_ok(T t, const json& v) {
    switch (t) {
        case T::UInt: return v.is_number_unsigned() || (v.is_number_integer() && v.get<int64_t>() >= 0);
        case T::Int: return v.is_number_integer();
        case T::Number: return v.is_number();
        case T::Bool: return v.is_boolean();
        case T::String: return v.is_string();
        case T::Object: return v.is_object();
        case T::IntArray:
            return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number_integer(); });
    }
    return false;
}

// Typed accessors over resolved params.
int geti(const json& p, const char* k) { return p.at(k).get<int>(); }
uint64_t getu(const json& p, const char* k) { return p.at(k).get<uint64_t>(); }
double getd(const json& p, const char* k) { return p.at(k).get<double>(); }
std::optional<double> optd(const json& p, const char* k) {
    return p.at(k).is_null() ? std::nullopt : std::optional<double>(p.at(k).get<double>());
}
std::optional<uint64_t> optu(const json& p, const char* k) {
    return p.at(k).is_null() ? std::nullopt : std::optional<uint64_t>(p.at(k).get<uint64_t>());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json_file(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw UsageError("'" + path + "' is not valid JSON: " + e.what());
    }
}

// Measured values of a Monte Carlo estimate always travel with their sample count and CI.
json mc_value(double estimate, uint64_t samples, double std_error, double lo, double hi) {
    return {{"estimate", estimate}, {"samples", samples}, {"std_error", std_error}, {"ci", {lo, hi}}, {"ci_level", 0.99}};
}

struct Context {
    json result = json::object();
    std::vector<AuditEntry> audits;
    std::vector<Sidecar> sidecars;
    bool exact = true;
};

GeneratorParameters generator_from(const json& p) {
    GeneratorOverrides ov;
    ov.t = optu(p, "t");
    ov.delta = optd(p, "delta");
    ov.k_h = optu(p, "k_h");
    return generator_parameters(geti(p, "ell"), getd(p, "eps"), getu(p, "n"), getd(p, "c"), ov);
}

json generator_json(const GeneratorParameters& g) {
    return {{"n", g.n},
            {"ell", g.ell},
            {"eps", g.eps},
            {"c", g.c},
            {"t_schedule", g.t_schedule},
            {"delta_schedule", g.delta_schedule},
            {"k_h_schedule", g.k_h_schedule},
            {"t", g.t},
            {"delta", g.delta},
            {"k_h", g.k_h},
            {"k_mask", g.k_mask},
            {"hash_seed_bits", g.hash_seed_bits},
            {"inner_seed_bits", g.inner_seed_bits},
            {"mask_seed_bits", g.mask_seed_bits},
            {"seed_bits_total", g.seed_bits_total},
            {"on_schedule", g.on_schedule}};
}

void cmd_prg_sample(const json& p, Context& ctx) {
    const HashingGenerator gen(generator_from(p));
    const auto seed = parse_seed_hex(p.at("seed_hex").get<std::string>(), gen.seed_bits());
    ctx.result["params"] = generator_json(gen.params());
    ctx.result["output"] = hashing_generator_sample(gen, seed);
    ctx.result["seed_hex"] = format_seed_hex(seed);
}

MultilinearPolynomial load_polynomial(const json& p) {
    const bool file = !p.at("poly").is_null(), inl = !p.at("poly_inline").is_null();
    if (file == inl) throw UsageError("fool: give exactly one of poly (file) or poly_inline");
    const json j = file ? parse_json_file(p.at("poly").get<std::string>()) : p.at("poly_inline");
    try {
        return MultilinearPolynomial::from_json(j);
    } catch (const json::exception& e) {
        throw UsageError(std::string("fool: malformed polynomial JSON: ") + e.what());
    }
}

void cmd_fool(const json& p, Context& ctx) {
    const auto poly = load_polynomial(p);
    const HashingGenerator gen(generator_from(p));
    const double eps = getd(p, "eps");
    FoolingOptions opts;
    opts.samples = getu(p, "samples");
    opts.rng_seed = getu(p, "rng_seed");
    opts.batches = geti(p, "batches");
    if (p.at("exact").get<bool>()) {
        if (opts.samples != 0) throw UsageError("fool: exact and samples are mutually exclusive");
        opts.mode = FoolingMode::Exact;
    } else if (opts.samples != 0) {
        opts.mode = FoolingMode::MonteCarlo;
    }
    const auto r = lipschitz_fooling_error(poly, gen, opts);
    ctx.exact = r.exact;
    ctx.result["generator"] = generator_json(gen.params());
    ctx.result["eps_target"] = eps;
    ctx.result["exact"] = r.exact;
    ctx.result["polynomial"] = poly.to_json();
    ctx.result["norm"] = r.scale;
    if (r.exact) {
        ctx.result["w1"] = r.w1;
        ctx.result["w1_unnormalized"] = r.w1_unnormalized;
        ctx.audits.push_back(make_check("lipschitz_fooling", r.w1, eps, "<=", r.w1 <= eps));
    } else {
        ctx.result["w1"] = mc_value(r.w1, r.samples, r.std_error, r.ci_low, r.ci_high);
        ctx.result["w1_unnormalized"] = mc_value(r.w1_unnormalized, r.samples, r.std_error * r.scale, r.ci_low * r.scale,
                                                 r.ci_high * r.scale);
        AuditEntry e = make_check("lipschitz_fooling", ctx.result["w1"], eps, "ci <=", r.ci_high <= eps,
                                  "empirical W1 over finite samples is biased upward");
        if (r.ci_high > eps && r.ci_low <= eps) {
            e.status = "na";
            e.note = "inconclusive: the confidence interval straddles eps";
        }
        ctx.audits.push_back(e);
    }
    if (r.decomposition) {
        const auto& d = *r.decomposition;
        ctx.result["decomposition"] = {{"pruning", std::max(d.pruning_x, d.pruning_y)},
                                       {"pruning_x", d.pruning_x},
                                       {"pruning_y", d.pruning_y},
                                       {"pruning_bound", d.pruning_bound},
                                       {"hybrid", d.hybrid_max},
                                       {"hybrid_avg", d.hybrid_avg},
                                       {"hybrid_bound", d.hybrid_bound},
                                       {"kolmogorov", d.kolmogorov_max},
                                       {"kolmogorov_bound", d.kolmogorov_bound},
                                       {"delta_observed", d.delta_observed},
                                       {"partitions", d.partitions}};
        ctx.audits.push_back(make_check("pruning_gap", std::max(d.pruning_x, d.pruning_y), d.pruning_bound, "<=", d.pruning_ok));
        ctx.audits.push_back(make_check("hybrid_gap", d.hybrid_max, d.hybrid_bound, "<=", d.hybrid_ok));
        ctx.audits.push_back(make_check("hybrid_kolmogorov", d.kolmogorov_max, d.kolmogorov_bound, "<=", d.kolmogorov_ok));
        ctx.audits.push_back(make_check("triangle_decomposition", r.w1, d.pruning_x + d.hybrid_avg + d.pruning_y, "<=", d.triangle_ok));
    }
}

EdgeFilter parse_filter(const std::string& s) {
    if (s == "auto") return EdgeFilter::Auto;
    if (s == "always") return EdgeFilter::Always;
    if (s == "never") return EdgeFilter::Never;
    throw UsageError("filter must be one of auto, always, never");
}

std::string filter_name(EdgeFilter f) {
    return f == EdgeFilter::Auto ? "auto" : f == EdgeFilter::Always ? "always" : "never";
}

struct GraphSpec {
    int n = 0, d = 0;
    double eps = 0;
    GraphOptions opts;
};

constexpr uint64_t kStoredStepLimit = uint64_t{1} << 16;

json graph_json(const GraphSpec& s, const ShortCodeGraph& g) {
    json j{{"n", s.n},
           {"d", s.d},
           {"eps", s.eps},
           {"filter", filter_name(s.opts.filter)},
           {"allow_wide_eps", s.opts.allow_wide_eps},
           {"k", g.space->k()},
           {"vertices", g.vertex_count()},
           {"rho", g.rho},
           {"step_mean", g.step_mean},
           {"max_steps", g.max_steps},
           {"min_weight_count", g.min_weight_count},
           {"filter_applied", g.filter_applied},
           {"rejected_mass", g.rejected_mass}};
    if (g.vertex_count() <= kStoredStepLimit) {
        json support = json::array();
        for (uint64_t m = 0; m < g.vertex_count(); ++m)
            if (g.step[m] != 0) support.push_back({BitVector::from_word(g.n(), g.space->word(m)).to_hex(), g.step[m]});
        j["step_support"] = support;
    }
    return j;
}

// A graph file is a `graph build` report (or any object with result.graph or
// top-level n, d, eps). The graph is rebuilt and checked against the stored step law.
std::pair<GraphSpec, ShortCodeGraph> load_graph(const std::string& path) {
    const json file = parse_json_file(path);
    const json* g = &file;
    if (file.contains("result") && file["result"].contains("graph")) g = &file["result"]["graph"];
    GraphSpec s;
    try {
        s.n = g->at("n").get<int>();
        s.d = g->at("d").get<int>();
        s.eps = g->at("eps").get<double>();
        s.opts.filter = parse_filter(g->value("filter", std::string("auto")));
        s.opts.allow_wide_eps = g->value("allow_wide_eps", false);
    } catch (const json::exception& e) {
        throw UsageError("'" + path + "' is not a graph file: " + e.what());
    }
    auto graph = build_short_code_graph(s.n, s.d, s.eps, s.opts);
    if (g->contains("step_support")) {
        const json rebuilt = graph_json(s, graph)["step_support"];
        if (rebuilt != g->at("step_support")) throw UsageError("'" + path + "': stored step law does not match the rebuilt graph");
    }
    return {s, std::move(graph)};
}

json codewords_json(int n, int d, const std::vector<BitVector>& words) {
    json arr = json::array();
    for (const auto& w : words) arr.push_back(w.to_hex());
    return {{"n", n}, {"d", d}, {"words", arr}};
}

void cmd_graph_build(const json& p, Context& ctx) {
    GraphSpec s{geti(p, "n"), geti(p, "d"), getd(p, "eps"), {}};
    s.opts.filter = parse_filter(p.at("filter").get<std::string>());
    s.opts.allow_wide_eps = p.at("allow_wide_eps").get<bool>();
    const auto g = build_short_code_graph(s.n, s.d, s.eps, s.opts);
    ctx.result["graph"] = graph_json(s, g);
    double mass = 0;
    for (double x : g.step) mass += x;
    ctx.audits.push_back(make_check("step_law_normalized", mass, 1.0, "|measured - bound| <= 1e-12", std::abs(mass - 1) <= 1e-12));
    if (!p.at("spectra_out").is_null()) ctx.sidecars.push_back({p.at("spectra_out").get<std::string>(), spectrum_csv(g)});
    if (!p.at("codewords_out").is_null())
        ctx.sidecars.push_back({p.at("codewords_out").get<std::string>(),
                                codewords_json(s.n, s.d, min_weight_codewords(s.n, s.d)).dump(2) + "\n"});
}

json optional_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

void cmd_graph_audit(const json& p, Context& ctx) {
    const auto [s, g] = load_graph(p.at("graph").get<std::string>());
    const double delta = getd(p, "delta");
    const auto a = spectrum_audit(g, delta);
    ctx.result["graph"] = graph_json(s, g);
    ctx.result["graph"].erase("step_support");
    ctx.result["spectrum"] = {{"delta", a.delta},
                              {"degree_limit", a.degree_limit},
                              {"gap_by_degree", a.gap_by_degree},
                              {"low_degree_checked", a.low_degree_checked},
                              {"low_degree_violations", a.low_degree_violations},
                              {"delta_fit", optional_json(a.delta_fit)},
                              {"mu0_fit", optional_json(a.mu0_fit)},
                              {"expected_inner", a.expected_inner},
                              {"min_adjacent_inner", a.min_adjacent_inner},
                              {"degenerate", a.degenerate}};
    ctx.audits.push_back(make_check("spectrum_low_degree", json{{"violations", a.low_degree_violations}, {"checked", a.low_degree_checked}},
                                    json{{"delta", delta}, {"degree_limit", a.degree_limit}}, "|lambda - rho^k| <= delta for k < limit",
                                    a.low_degree_ok));
    ctx.audits.push_back(make_check("expected_inner_product", a.expected_inner, a.expected_inner_bound, ">=", a.expected_inner_ok));
    if (a.filter_applied)
        ctx.audits.push_back(make_check("adjacent_inner_product", a.min_adjacent_inner, 0.75 * g.space->length(), ">", a.adjacency_ok));
    ctx.audits.push_back(make_info("spectrum_delta_fit", optional_json(a.delta_fit),
                                   "smallest delta whose low-degree window holds and contains degree 1"));
    ctx.audits.push_back(make_info("spectrum_mu0_fit", optional_json(a.mu0_fit), "largest mu0 satisfying the high-degree bullet"));
    if (!p.at("spectra_out").is_null()) ctx.sidecars.push_back({p.at("spectra_out").get<std::string>(), spectrum_csv(g)});
}

std::vector<int> set_indices(std::span<const char> in) {
    std::vector<int> v;
    for (size_t i = 0; i < in.size(); ++i)
        if (in[i]) v.push_back(static_cast<int>(i));
    return v;
}

void cmd_graph_fold(const json& p, Context& ctx) {
    const auto [s, g] = load_graph(p.at("graph").get<std::string>());
    const auto f = fold(g);
    const uint64_t V = g.vertex_count();
    const int C = f.graph.size();
    json sizes = json::array();
    for (const auto& o : f.orbits.members) sizes.push_back(o.size());
    ctx.result["graph"] = graph_json(s, g);
    ctx.result["graph"].erase("step_support");
    ctx.result["folded"] = {{"vertices", C}, {"orbit_sizes", sizes}, {"stationary", f.stationary}};
    if (C <= 256) ctx.result["folded"]["weights"] = f.graph.weights();

    uint64_t stat_bad = 0;
    for (int i = 0; i < C; ++i)
        if (f.stationary[i] != static_cast<double>(f.orbits.members[i].size()) / static_cast<double>(V)) ++stat_bad;
    ctx.audits.push_back(make_check("folded_stationary", stat_bad, 0, "mismatches ==", stat_bad == 0));

    // Exact shift invariance of every edge weight, when affordable.
    const double work = static_cast<double>(V) * static_cast<double>(V) * g.space->length();
    if (work <= static_cast<double>(enumeration_cap()) * 16) {
        uint64_t bad = 0;
        std::vector<uint64_t> img(V);
        for (uint32_t b = 0; b < static_cast<uint32_t>(g.space->length()); ++b) {
            for (uint64_t u = 0; u < V; ++u) img[u] = g.space->shift_message(u, b);
            for (uint64_t u = 0; u < V; ++u)
                for (uint64_t v = 0; v < V; ++v)
                    if (g.weight(img[u], img[v]) != g.weight(u, v)) ++bad;
        }
        ctx.audits.push_back(make_check("edge_weight_invariance", bad, 0, "mismatches ==", bad == 0));
    } else {
        ctx.audits.push_back(make_info("edge_weight_invariance", nullptr, "skipped: |V|^2 N exceeds the enumeration budget"));
    }

    std::mt19937_64 rng(getu(p, "rng_seed"));
    double worst = 0;
    int cuts = 0;
    for (int trial = 0; trial < geti(p, "cuts") && C >= 2; ++trial) {
        std::vector<char> in(C);
        for (auto& x : in) x = static_cast<char>(rng() & 1u);
        if (std::all_of(in.begin(), in.end(), [](char x) { return x; }) || std::none_of(in.begin(), in.end(), [](char x) { return x; }))
            continue;
        ++cuts;
        worst = std::max(worst, std::abs(conductance(f.graph, in) - conductance(g, lift_cut(f, in))));
    }
    ctx.audits.push_back(make_check("folded_conductance", json{{"max_difference", worst}, {"cuts", cuts}}, 1e-12,
                                    "max_difference <=", worst <= 1e-12));
}

// Influence spread of a lifted cut across coordinates, for every ell < 2^d.
double influence_spread(const ShortCodeGraph& g, std::span<const char> lifted) {
    std::vector<double> vals(lifted.size());
    for (size_t u = 0; u < lifted.size(); ++u) vals[u] = lifted[u] ? 1.0 : 0.0;
    const CodeFunction cf(g.space, vals);
    double worst = 0;
    for (int ell = 1; ell < (1 << g.d()); ++ell) {
        double lo = 1e300, hi = -1e300;
        for (int pnt = 0; pnt < g.space->length(); ++pnt) {
            const double x = influence(cf, pnt, ell);
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        worst = std::max(worst, hi - lo);
    }
    return worst;
}

json separator_json(const SeparatorResult& r) {
    return {{"feasible", r.feasible}, {"optimal", r.optimal},         {"phi", r.phi},
            {"lower_bound", r.lower_bound}, {"method", r.method}, {"witness", set_indices(r.witness)}};
}

void cmd_graph_cut(const json& p, Context& ctx) {
    const auto [s, g] = load_graph(p.at("graph").get<std::string>());
    const auto f = fold(g);
    SeparatorOptions so;
    so.brute_force_cap = geti(p, "brute_force_cap");
    so.restarts = geti(p, "restarts");
    so.rng_seed = getu(p, "rng_seed");
    const double b = getd(p, "b");
    if (!(b > 0 && b <= 0.5)) throw UsageError("b must lie in (0, 1/2]");
    const auto r = balanced_separator_opt(f.graph, b, so);
    ctx.exact = r.optimal;
    ctx.result["graph"] = graph_json(s, g);
    ctx.result["graph"].erase("step_support");
    ctx.result["b"] = b;
    ctx.result["folded_vertices"] = f.graph.size();
    ctx.result["separator"] = separator_json(r);
    ctx.audits.push_back(make_check("separator_feasible", r.feasible, true, "==", r.feasible));
    if (!r.feasible) return;
    const auto lifted = lift_cut(f, r.witness);
    const double lifted_phi = conductance(g, lifted);
    ctx.result["separator"]["lifted_size"] = std::count(lifted.begin(), lifted.end(), 1);
    ctx.audits.push_back(make_check("lifted_cut_conductance", json{{"folded", r.phi}, {"lifted", lifted_phi}}, 1e-12,
                                    "|folded - lifted| <=", std::abs(r.phi - lifted_phi) <= 1e-12));
    const double spread = influence_spread(g, lifted);
    ctx.audits.push_back(make_check("lifted_cut_influence_symmetry", spread, 1e-12, "<=", spread <= 1e-12,
                                    "max - min influence over coordinates, every ell < 2^d"));
    ctx.audits.push_back(make_check("separator_lower_bound", r.lower_bound, r.phi, "<=", r.lower_bound <= r.phi + 1e-12));
}

void cmd_gap(const json& p, Context& ctx) {
    GapParams gp;
    gp.n = geti(p, "n");
    gp.d = geti(p, "d");
    gp.eps = getd(p, "eps");
    gp.b = getd(p, "b");
    gp.rounds = geti(p, "rounds");
    gp.tensor = geti(p, "tensor");
    gp.lifted.delta = optd(p, "delta");
    gp.graph.filter = parse_filter(p.at("filter").get<std::string>());
    gp.graph.allow_wide_eps = p.at("allow_wide_eps").get<bool>();
    gp.separator.brute_force_cap = geti(p, "brute_force_cap");
    gp.separator.restarts = geti(p, "restarts");
    gp.separator.rng_seed = getu(p, "rng_seed");
    gp.matching_pairs_cap = getu(p, "matching_pairs_cap");
    const auto r = gap_report(gp);
    const auto& sol = r.solution;
    ctx.exact = r.integral.optimal;

    const double N = std::ldexp(1.0, gp.n);
    ctx.result["folded_vertices"] = r.folded_vertices;
    ctx.result["integral"] = separator_json(r.integral);
    ctx.result["balance"] = r.balance;
    ctx.result["balance_threshold"] = r.balance_threshold;
    ctx.result["feasible"] = r.feasible;
    ctx.result["sdp"] = r.sdp;
    ctx.result["gap"] = optional_json(r.gap);
    ctx.result["gap_status"] = r.gap_status;
    ctx.result["lifted"] = {{"tensor", sol.tensor},
                            {"rounds", sol.rounds},
                            {"delta_schedule", sol.delta_schedule},
                            {"delta", sol.delta},
                            {"delta_clamped", sol.delta_clamped},
                            {"delta_forced", sol.delta_forced},
                            {"anchor", sol.anchor},
                            {"min_eigenvalue", sol.min_eigenvalue},
                            {"nearly_orthogonal_clouds", r.near_orth_clouds}};
    if (static_cast<int>(sol.gram.rows()) <= geti(p, "gram_cap")) {
        json rows = json::array();
        for (int i = 0; i < sol.gram.rows(); ++i) {
            json row = json::array();
            for (int j = 0; j < sol.gram.cols(); ++j) row.push_back(sol.gram(i, j));
            rows.push_back(row);
        }
        ctx.result["lifted"]["gram"] = rows;
    }

    ctx.audits.push_back(make_info("near_orthogonality_fraction",
                                   json{{"fraction", r.near_orth_codewords.fraction},
                                        {"nearly_orthogonal", r.near_orth_codewords.nearly_orthogonal},
                                        {"codewords", r.near_orth_codewords.codewords},
                                        {"threshold", std::pow(N, 2.0 / 3) / 2}},
                                   "asymptotic trend: fraction tends to 1 as N grows"));
    if (r.near_orth_clouds > 0)
        ctx.audits.push_back(make_check("cloud_gram_eigen_bound", r.cloud_gram_max_eigenvalue, 9.0 / 8, "<=",
                                        r.cloud_gram_max_eigenvalue <= 9.0 / 8));
    ctx.audits.push_back(make_check("matching_property", json{{"pairs", r.matching_pairs}, {"failures", r.matching_failures}}, 0,
                                    "failures ==", r.matching_failures == 0));
    ctx.audits.push_back(make_check("lifted_gram_psd", sol.min_eigenvalue, -1e-8, ">=", sol.min_eigenvalue >= -1e-8));
    ctx.audits.push_back(make_check("vector_realization",
                                    json{{"balance_diff", r.vector_balance_diff}, {"objective_diff", r.vector_objective_diff}}, 1e-8,
                                    "max diff <=", std::max(r.vector_balance_diff, r.vector_objective_diff) <= 1e-8));
    ctx.audits.push_back(make_check("balance_constraint", r.balance, r.balance_threshold, ">=", r.feasible,
                                    "E ||v_B - v_B'||^2 / 4 against 2 b (1 - b)"));
    ctx.audits.push_back(make_info("sdp_objective", json{{"sdp", r.sdp}, {"eps_times_t", gp.eps * gp.tensor}},
                                   "trend: O(t eps) + O(delta) + lower-order terms"));
    ctx.audits.push_back(make_info("integral_value",
                                   json{{"phi", r.integral.phi}, {"lower_bound", r.integral.lower_bound}, {"optimal", r.integral.optimal}}));
    ctx.audits.push_back(make_info("gap_ratio", json{{"gap", optional_json(r.gap)}, {"status", r.gap_status}}));
}

void cmd_audit_all(const json& p, Context& ctx, json& timing) {
    AuditAllOptions o;
    o.rng_seed = getu(p, "rng_seed");
    o.only = p.at("only").get<std::vector<int>>();
    for (int k : o.only)
        if (k < 1 || k > 10) throw UsageError("audit-all: criterion numbers lie in [1, 10]");
    o.fooling_polynomials = geti(p, "fooling_polynomials");
    o.pruning_polynomials = geti(p, "pruning_polynomials");
    if (o.fooling_polynomials < 1 || o.pruning_polynomials < 1) throw UsageError("audit-all: polynomial counts must be positive");
    json criteria = json::array(), secs = json::object();
    for (const auto& c : audit_all(o)) {
        criteria.push_back({{"number", c.number}, {"name", c.name}, {"pass", c.pass()}});
        secs[std::to_string(c.number)] = c.seconds;
        for (auto e : c.entries) {
            e.id = "c" + std::to_string(c.number) + "." + e.id;
            ctx.audits.push_back(e);
        }
    }
    ctx.result["criteria"] = criteria;
    timing["criteria_seconds"] = secs;
}

}  // namespace

const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> v = [] {
        std::vector<std::string> out;
        for (const auto& [k, _] : param_table()) out.push_back(k);
        return out;
    }();
    return v;
}

std::vector<ParamInfo> param_info(const std::string& command) {
    static const char* names[] = {"uint", "int", "number", "bool", "string", "object", "int_array"};
    std::vector<ParamInfo> out;
    for (const auto& s : defs_for(command)) out.push_back({s.name, names[static_cast<int>(s.type)], s.def, s.required});
    return out;
}

json default_params(const std::string& command) {
    json out = json::object();
    for (const auto& s : defs_for(command)) out[s.name] = s.def;
    return out;
}

json resolve_params(const std::string& command, const json& given) {
    if (!given.is_object()) throw UsageError("parameters must be a JSON object");
    const auto& table = defs_for(command);
    json out = default_params(command);
    for (const auto& [k, v] : given.items()) {
        const auto it = std::find_if(table.begin(), table.end(), [&](const ParamDef& s) { return k == s.name; });
        if (it == table.end()) throw UsageError("unknown parameter '" + k + "' for " + command);
        if (v.is_null() && !it->required && it->def.is_null()) continue;
        if (!type_ok(it->type, v)) throw UsageError("parameter '" + k + "' has the wrong type");
        out[k] = v;
    }
    for (const auto& s : table)
        if (s.required && out[s.name].is_null()) throw UsageError(std::string("missing required parameter '") + s.name + "'");
    return out;
}

json load_config_params(const std::string& path, const std::string& command) {
    const json j = parse_json_file(path);
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    if (j.contains("params")) {
        if (j.contains("command") && j["command"] != command)
            throw UsageError("config is for command '" + j["command"].get<std::string>() + "', not '" + command + "'");
        return j["params"];
    }
    json flat = j;
    if (flat.contains("command")) {
        if (flat["command"] != command) throw UsageError("config command does not match '" + command + "'");
        flat.erase("command");
    }
    return flat;
}

json strip_timing(const json& report) {
    json r = report;
    r.erase("timing");
    return r;
}

RunResult run(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const json params = resolve_params(config.command, config.params);
    Context ctx;
    json timing = json::object();
    try {
        const auto& c = config.command;
        if (c == "prg sample") cmd_prg_sample(params, ctx);
        else if (c == "fool") cmd_fool(params, ctx);
        else if (c == "graph build") cmd_graph_build(params, ctx);
        else if (c == "graph audit") cmd_graph_audit(params, ctx);
        else if (c == "graph fold") cmd_graph_fold(params, ctx);
        else if (c == "graph cut") cmd_graph_cut(params, ctx);
        else if (c == "gap") cmd_gap(params, ctx);
        else if (c == "audit-all") cmd_audit_all(params, ctx, timing);
    } catch (const ParameterError& e) {
        throw UsageError(e.what());
    } catch (const SeedError& e) {
        throw UsageError(e.what());
    } catch (const CapExceeded& e) {
        throw UsageError(e.what());
    } catch (const ConstructionError& e) {
        ctx.audits.push_back(make_check("construction", e.what(), nullptr, "completes", false));
    }

    RunResult out;
    json audits = json::array();
    for (const auto& e : ctx.audits) {
        audits.push_back(to_json(e));
        if (e.status == "fail") out.failing.push_back(e.id);
    }
    out.exit_code = out.failing.empty() ? 0 : 1;
    timing["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.report = {{"tool", "derand"},
                  {"version", kVersion},
                  {"command", config.command},
                  {"config", {{"command", config.command}, {"params", params}}},
                  {"enumeration_cap", enumeration_cap()},
                  {"exact", ctx.exact},
                  {"result", ctx.result},
                  {"audits", audits},
                  {"pass", out.failing.empty()},
                  {"failing_claims", out.failing},
                  {"timing", timing}};
    out.sidecars = std::move(ctx.sidecars);
    return out;
}

}  // namespace derand
