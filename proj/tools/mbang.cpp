#include <mbang/mbang.hpp>

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <iostream>
#include <optional>
#include <random>

using namespace mbang;

namespace {

void emit(const std::string& out, const std::string& text)
{
    if (out.empty() || out == "-")
        std::cout << text;
    else
        io::write_text_file(out, text);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed)
{
    if (seed) return *seed;
    std::random_device rd;
    std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cerr << "seed: " << s << '\n';
    return s;
}

std::vector<Vertex> zero_based(const std::vector<int>& labels)
{
    std::vector<Vertex> out;
    for (int v : labels) out.push_back(v - 1);
    return out;
}

// --- simulate ---

struct SimulateArgs {
    std::string spec, out;
    std::size_t n = 0;
    std::optional<std::uint64_t> seed;
};

void run_simulate(const SimulateArgs& a)
{
    if (a.n == 0) throw UsageError("--n must be positive");
    auto spec = io::spec_from_json(io::read_json_file(a.spec));
    auto seed = resolve_seed(a.seed);
    auto sim = simulate(spec, a.n, seed);
    std::fprintf(stderr, "spec hash: %016" PRIx64 "\n", io::spec_hash(spec));
    if (a.out.empty()) {
        std::cout << io::to_csv(sim.data);
    } else {
        io::write_dataset(a.out, sim.data);
    }
}

// --- discover ---

struct DiscoverArgs {
    std::string data, stage, oracle_spec, out;
    double tolerance = 0.05;
    bool no_standardize = false, strict_test = false, prose = false, lenient_bows = false;
    bool exact = false;
};

void run_discover(const DiscoverArgs& a)
{
    DiscoveryConfig cfg;
    cfg.cumulant_tolerance = a.tolerance;
    cfg.standardize = !a.no_standardize;
    cfg.relaxed = a.strict_test ? RelaxedTest::off : a.prose ? RelaxedTest::prose : RelaxedTest::listing;
    cfg.validate();

    DiscoveryResult result;
    if (a.exact) {
        if (a.oracle_spec.empty()) throw UsageError("--exact needs --oracle-spec");
        cfg.zero_test = ZeroTestMode::exact;
        result = run_mbang_population(io::spec_from_json(io::read_json_file(a.oracle_spec)), cfg);
    } else {
        if (a.data.empty()) throw UsageError("--data is required unless --exact is given");
        if (a.tolerance == 0.0)
            std::cerr << "warning: tolerance 0 on sample data; sample cumulants are almost surely nonzero, so every "
                         "clique will be merged\n";
        auto y = io::read_dataset(a.data);
        FirstStageResult stage;
        if (!a.stage.empty()) {
            std::vector<std::string> warnings;
            stage = io::load_external_first_stage(a.stage, !a.lenient_bows, &warnings);
            for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
        } else {
            stage = oracle_first_stage(io::spec_from_json(io::read_json_file(a.oracle_spec)));
        }
        result = run_mbang(y, stage, cfg, !a.lenient_bows);
    }
    emit(a.out, io::to_json(result, cfg).dump(2) + "\n");
    std::cerr << to_string(result.graph);
}

// --- treks ---

void run_treks(const std::string& graph_file, const std::vector<int>& tuple)
{
    auto g = io::graph_from_json(io::read_json_file(graph_file));
    VertexTuple t(zero_based(tuple), g.p());
    auto w = find_k_trek(g, t);
    if (!w) {
        std::cout << "false\n";
        return;
    }
    std::cout << "true\n";
    if (w->kind == TrekWitness::Kind::common_source) {
        std::cout << "source: " << w->paths.front().front() + 1 << '\n';
    } else {
        const auto& h = g.multi()[*w->edge];
        std::cout << "source: (";
        for (std::size_t i = 0; i < h.size(); ++i) std::cout << (i ? "," : "") << h[i] + 1;
        std::cout << ") <-*->\n";
    }
    for (const auto& path : w->paths) {
        std::cout << "path:";
        for (std::size_t i = 0; i < path.size(); ++i) std::cout << (i ? " -> " : " ") << path[i] + 1;
        std::cout << '\n';
    }
}

// --- cumulants ---

struct CumulantArgs {
    std::string data, indices = "all", out;
    int k = 0;
    bool center = false;
};

void run_cumulants(const CumulantArgs& a)
{
    if (a.k < 1) throw UsageError("--k must be at least 1");
    if (a.k > max_cumulant_order)
        throw NumericalError("cumulant order " + std::to_string(a.k) + " exceeds the supported maximum of " +
                             std::to_string(max_cumulant_order));
    auto data = io::read_dataset(a.data);
    if (a.center) data = center_rows(std::move(data));
    SampleCumulants source(data);
    CumulantTensor t(a.k, source.p());
    if (a.indices == "all") {
        for_each_multi_index(source.p(), a.k, [&](const MultiIndex& idx) { t.set(idx, source.cumulant(idx)); });
    } else {
        auto j = io::read_json_file(a.indices);
        const auto& list = j.is_object() ? j.at("indices") : j;
        if (!list.is_array()) throw ValidationError(a.indices + ": expected an array of index tuples");
        for (const auto& entry : list) {
            auto idx = io::detail::vertex_list(entry, "index");
            if (static_cast<int>(idx.size()) != a.k)
                throw ValidationError(a.indices + ": index of length " + std::to_string(idx.size()) + ", expected " +
                                      std::to_string(a.k));
            for (Vertex v : idx) detail::check_vertex(v, source.p(), "index");
            t.set(idx, source.cumulant(idx));
        }
    }
    emit(a.out, io::to_json(t).dump(2) + "\n");
}

// --- benchmark ---

struct BenchArgs {
    TrialConfig cfg;
    std::string noise = "uniform(-10,10)", stage = "oracle", csv, summary;
    std::optional<std::uint64_t> seed;
    bool strict_test = false, prose = false, no_standardize = false;
};

void run_bench(BenchArgs a)
{
    a.cfg.noise = NoiseSpec::parse(a.noise);
    if (a.stage == "oracle")
        a.cfg.stage = StageKind::oracle;
    else if (a.stage == "external")
        a.cfg.stage = StageKind::external;
    else if (a.stage == "population") {
        a.cfg.stage = StageKind::population;
        a.cfg.discovery.zero_test = ZeroTestMode::exact;
    } else
        throw UsageError("--stage must be oracle, external or population");
    a.cfg.discovery.relaxed = a.strict_test ? RelaxedTest::off : a.prose ? RelaxedTest::prose : RelaxedTest::listing;
    a.cfg.discovery.standardize = !a.no_standardize;
    a.cfg.seed = resolve_seed(a.seed);
    auto result = run_benchmark(a.cfg);
    for (const auto& o : result.outcomes)
        if (!o.error.empty()) std::cerr << "trial " << o.trial << " failed: " << o.error << '\n';
    if (!a.csv.empty()) io::write_text_file(a.csv, outcomes_csv(a.cfg, result.outcomes));
    emit(a.summary, summary_json(a.cfg, result.summary).dump(2) + "\n");
}

// --- graph tools ---

MixedGraph load_graph(const std::string& path) { return io::graph_from_json(io::read_json_file(path)); }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multidirected edge discovery in linear non-Gaussian models with hidden variables"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Draw a dataset from an LSEM spec");
    c_sim->add_option("--spec", sim.spec, "Spec JSON")->required()->check(CLI::ExistingFile);
    c_sim->add_option("-n,--n", sim.n, "Sample count")->required();
    c_sim->add_option("--seed", sim.seed, "RNG seed (printed to stderr when omitted)");
    c_sim->add_option("-o,--out", sim.out, "Output dataset (.csv, or .bin/.mbd for binary); stdout if omitted");

    DiscoverArgs disc;
    auto* c_disc = app.add_subcommand("discover", "Recover multidirected edges from data and a first stage");
    c_disc->add_option("--data", disc.data, "Dataset file");
    auto* stage_opt = c_disc->add_option("--stage", disc.stage, "First-stage JSON")->check(CLI::ExistingFile);
    auto* oracle_opt =
        c_disc->add_option("--oracle-spec", disc.oracle_spec, "Use the true first stage of this spec")->check(CLI::ExistingFile);
    stage_opt->excludes(oracle_opt);
    c_disc->add_option("--tolerance", disc.tolerance, "Cumulant zero threshold")->capture_default_str();
    c_disc->add_flag("--no-standardize", disc.no_standardize, "Skip scaling rows to unit variance");
    auto* strict_flag = c_disc->add_flag("--strict", disc.strict_test, "Only the order k+1 cumulant test");
    auto* relaxed_flag = c_disc->add_flag("--relaxed", "Also test order k+2 with one repeated clique index (default)");
    auto* prose_flag = c_disc->add_flag("--prose", disc.prose, "Relaxed test that may also repeat the candidate");
    strict_flag->excludes(relaxed_flag)->excludes(prose_flag);
    c_disc->add_flag("--lenient-bows", disc.lenient_bows, "Warn instead of failing on bows in the first stage");
    c_disc->add_flag("--exact", disc.exact, "Population cumulants of --oracle-spec with a 1e-9 zero test");
    c_disc->add_option("-o,--out", disc.out, "Output JSON; stdout if omitted");

    std::string trek_graph;
    std::vector<int> trek_tuple;
    auto* c_trek = app.add_subcommand("treks", "Check for a k-trek between a tuple of vertices");
    c_trek->add_option("--graph", trek_graph, "Graph JSON")->required()->check(CLI::ExistingFile);
    c_trek->add_option("--tuple", trek_tuple, "Vertices, e.g. 2,3,4")->required()->delimiter(',');

    CumulantArgs cum;
    auto* c_cum = app.add_subcommand("cumulants", "Sample cumulant entries of a dataset");
    c_cum->add_option("--data", cum.data, "Dataset file")->required()->check(CLI::ExistingFile);
    c_cum->add_option("-k,--k", cum.k, "Order")->required();
    c_cum->add_option("--indices", cum.indices, "all, or a JSON file of 1-based index tuples")->capture_default_str();
    c_cum->add_flag("--center", cum.center, "Center rows first");
    c_cum->add_option("-o,--out", cum.out, "Output JSON; stdout if omitted");

    BenchArgs bench;
    auto* c_bench = app.add_subcommand("benchmark", "Random-graph recovery experiment");
    // Config files are read by the root app; keys go under a [benchmark] section.
    app.set_config("--config", "", "INI/TOML file; benchmark keys under [benchmark]");
    c_bench->fallthrough();
    c_bench->add_option("--p-pre", bench.cfg.p_pre, "Vertices before marginalization")->capture_default_str();
    c_bench->add_option("--edges", bench.cfg.edges, "Directed edges in the pre-marginalization DAG")->capture_default_str();
    c_bench->add_option("--noise", bench.noise, "Noise law")->capture_default_str();
    c_bench->add_option("-n,--n", bench.cfg.n, "Sample size")->capture_default_str();
    c_bench->add_option("--trials", bench.cfg.trials, "Trial count")->capture_default_str();
    c_bench->add_option("--stage", bench.stage, "oracle, external or population")->capture_default_str();
    c_bench->add_option("--external-dir", bench.cfg.external_dir, "Directory of trial_<t>.json first stages");
    c_bench->add_option("--export-dir", bench.cfg.export_dir, "Write each trial's data and truth here");
    c_bench->add_option("--seed", bench.seed, "Base seed (printed to stderr when omitted)");
    c_bench->add_option("--hidden-probability", bench.cfg.hidden_probability)->capture_default_str();
    c_bench->add_option("--max-hidden", bench.cfg.max_hidden)->capture_default_str();
    c_bench->add_option("--tolerance", bench.cfg.discovery.cumulant_tolerance)->capture_default_str();
    c_bench->add_flag("--strict", bench.strict_test, "Only the order k+1 cumulant test");
    c_bench->add_flag("--prose", bench.prose, "Relaxed test that may also repeat the candidate");
    c_bench->add_flag("--no-standardize", bench.no_standardize);
    c_bench->add_option("--threads", bench.cfg.threads, "Workers (0 = all cores; MBANG_THREADS caps)");
    c_bench->add_option("--csv", bench.csv, "Per-trial CSV output");
    c_bench->add_option("--summary", bench.summary, "Aggregate JSON output; stdout if omitted");

    auto* c_gt = app.add_subcommand("graph-tools", "Inspect and transform graphs");
    c_gt->require_subcommand(1);
    std::string gt_graph, gt_out;
    auto* gt_validate = c_gt->add_subcommand("validate", "Check a graph or spec (acyclic, bow-free)");
    std::string gt_spec;
    gt_validate->add_option("--graph", gt_graph)->check(CLI::ExistingFile);
    gt_validate->add_option("--spec", gt_spec)->check(CLI::ExistingFile);
    auto* gt_print = c_gt->add_subcommand("print", "Human-readable edge listing");
    gt_print->add_option("--graph", gt_graph)->required()->check(CLI::ExistingFile);
    auto* gt_dot = c_gt->add_subcommand("dot", "Graphviz output");
    gt_dot->add_option("--graph", gt_graph)->required()->check(CLI::ExistingFile);
    auto* gt_sub = c_gt->add_subcommand("subdivide", "Bidirected subdivision as a graph JSON");
    gt_sub->add_option("--graph", gt_graph)->required()->check(CLI::ExistingFile);
    auto* gt_cliques = c_gt->add_subcommand("cliques", "Maximal cliques of the bidirected subdivision");
    gt_cliques->add_option("--graph", gt_graph)->required()->check(CLI::ExistingFile);
    int rnd_p = 7, rnd_edges = 5, rnd_max_hidden = 3;
    double rnd_hidden = 0.5;
    std::string rnd_noise = "uniform(-10,10)";
    std::optional<std::uint64_t> rnd_seed;
    auto* gt_random = c_gt->add_subcommand("random", "Random bow-free spec");
    gt_random->add_option("--p-pre", rnd_p)->capture_default_str();
    gt_random->add_option("--edges", rnd_edges)->capture_default_str();
    gt_random->add_option("--noise", rnd_noise)->capture_default_str();
    gt_random->add_option("--hidden-probability", rnd_hidden)->capture_default_str();
    gt_random->add_option("--max-hidden", rnd_max_hidden)->capture_default_str();
    gt_random->add_option("--seed", rnd_seed);
    gt_random->add_option("-o,--out", gt_out);
    std::vector<int> marg_hidden;
    bool marg_drop_directed = false;
    auto* gt_marg = c_gt->add_subcommand("marginalize", "Project a DAG onto its observed vertices");
    gt_marg->add_option("--graph", gt_graph)->required()->check(CLI::ExistingFile);
    gt_marg->add_option("--hidden", marg_hidden, "Hidden vertices, e.g. 1,5")->delimiter(',');
    gt_marg->add_flag("--drop-directed", marg_drop_directed, "Break bows by dropping the directed edge");
    for (auto* c : {gt_sub, gt_marg}) c->add_option("-o,--out", gt_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
    }

    try {
        if (*c_sim) {
            run_simulate(sim);
        } else if (*c_disc) {
            if (disc.stage.empty() && disc.oracle_spec.empty())
                throw UsageError("one of --stage or --oracle-spec is required");
            run_discover(disc);
        } else if (*c_trek) {
            run_treks(trek_graph, trek_tuple);
        } else if (*c_cum) {
            run_cumulants(cum);
        } else if (*c_bench) {
            run_bench(bench);
        } else if (*gt_validate) {
            if (gt_graph.empty() == gt_spec.empty()) throw UsageError("give exactly one of --graph or --spec");
            if (!gt_spec.empty()) {
                io::spec_from_json(io::read_json_file(gt_spec));
            } else {
                auto g = load_graph(gt_graph);
                if (!is_acyclic(g)) throw ValidationError("graph has a directed cycle");
                if (!is_bow_free(g)) throw ValidationError("graph has a bow");
            }
            std::cout << "ok\n";
        } else if (*gt_print) {
            std::cout << to_string(load_graph(gt_graph));
        } else if (*gt_dot) {
            std::cout << to_dot(load_graph(gt_graph));
        } else if (*gt_sub) {
            auto bg = bidirected_subdivision(load_graph(gt_graph));
            std::vector<VertexSet> pairs;
            for (const auto& [a, b] : bg.pairs()) pairs.push_back({a, b});
            auto g = load_graph(gt_graph);
            emit(gt_out, io::to_json(MixedGraph(g.p(), g.directed(), pairs)).dump(2) + "\n");
        } else if (*gt_cliques) {
            for (const auto& c : enumerate_cliques(bidirected_subdivision(load_graph(gt_graph)))) {
                for (std::size_t i = 0; i < c.size(); ++i) std::cout << (i ? " " : "") << c[i] + 1;
                std::cout << '\n';
            }
        } else if (*gt_random) {
            RandomModelOptions opt;
            opt.noise = NoiseSpec::parse(rnd_noise);
            opt.hidden_probability = rnd_hidden;
            opt.max_hidden = rnd_max_hidden;
            auto model = random_bowfree(rnd_p, rnd_edges, resolve_seed(rnd_seed), opt);
            emit(gt_out, io::to_json(model.spec).dump(2) + "\n");
        } else if (*gt_marg) {
            auto m = marginalize(load_graph(gt_graph), zero_based(marg_hidden),
                                 marg_drop_directed ? BowRule::drop_directed_edge : BowRule::drop_parent_from_edge);
            auto j = io::to_json(m.graph);
            j["observed"] = io::json::array();
            for (Vertex v : m.observed) j["observed"].push_back(v + 1);
            emit(gt_out, j.dump(2) + "\n");
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::usage);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::validation);
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::numerical);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::validation);
    }
    return 0;
}
