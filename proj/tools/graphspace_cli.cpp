// graphspace command line: matching, distances, geodesics, means, PCA,
// sampling, nearest-neighbour classification and the recovery benchmark.
//
// exit status: 0 ok, 2 invalid input, 3 solver did not converge (output is
// still written), 1 anything else.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "graphspace/graphspace.hpp"

namespace fs = std::filesystem;
using namespace graphspace;

namespace {

struct Globals {
    double lambda = 0.0;
    std::string solver = "faq";
    std::string padding = "two_way";
    std::string init = "barycenter";
    std::uint64_t seed = 0;
    int max_iter = 100;
    double tol = 1e-8;
    int restarts = 0;
    bool no_refine = false;
    unsigned threads = 0;

    MatchConfig config() const {
        MatchConfig cfg;
        cfg.lambda = lambda;
        cfg.seed = seed;
        cfg.max_iter = max_iter;
        cfg.tol = tol;
        cfg.restarts = restarts;
        cfg.refinement = !no_refine;
        if (solver == "faq") {
            cfg.solver = Solver::faq;
        } else if (solver == "umeyama") {
            cfg.solver = Solver::umeyama;
        } else if (solver == "brute") {
            cfg.solver = Solver::brute;
        } else {
            throw ValidationError("unknown solver '" + solver + "' (faq, umeyama, brute)");
        }
        if (padding == "two_way") {
            cfg.padding = Padding::two_way;
        } else if (padding == "one_way") {
            cfg.padding = Padding::one_way;
        } else if (padding == "none") {
            cfg.padding = Padding::none;
        } else {
            throw ValidationError("unknown padding '" + padding + "' (two_way, one_way, none)");
        }
        if (init == "barycenter") {
            cfg.faq_init = FaqInit::barycenter;
        } else if (init == "identity") {
            cfg.faq_init = FaqInit::identity;
        } else if (init == "random") {
            cfg.faq_init = FaqInit::random;
        } else {
            throw ValidationError("unknown FAQ start '" + init + "' (barycenter, identity, random)");
        }
        cfg.validate();
        return cfg;
    }
};

struct Corpus {
    std::vector<std::string> ids;
    std::vector<Graph> graphs;
};

// Files are taken as given; directories contribute their *.json files in name order.
Corpus load_corpus(const std::vector<std::string>& inputs) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        const fs::path p(in);
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& entry : fs::directory_iterator(p)) {
                if (entry.is_regular_file() && entry.path().extension() == ".json") {
                    found.push_back(entry.path());
                }
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(p);
        }
    }
    internal::require(!files.empty(), "no input graphs");
    Corpus c;
    for (const auto& f : files) {
        c.ids.push_back(f.stem().string());
        c.graphs.push_back(load_graph(f));
    }
    return c;
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
        std::cout.flush();
    } else {
        write_text_file(out, text);
    }
}

std::string numbered(const std::string& prefix, Index k, Index total) {
    const std::size_t width = std::max<std::size_t>(3, std::to_string(std::max<Index>(total - 1, 0)).size());
    std::string digits = std::to_string(k);
    digits.insert(0, width - std::min(width, digits.size()), '0');
    return prefix + digits + ".json";
}

json trace_json(const SolverTrace& t) {
    return {{"iterations", t.iterations},  {"converged", t.converged},
            {"objectives", t.objectives},  {"step_sizes", t.step_sizes},
            {"refinement_swaps", t.refinement_swaps}, {"runs", t.runs},
            {"best_run", t.best_run}};
}

json match_json(const MatchResult& r) {
    json j;
    j["permutation"] = r.p.images();
    j["lambda"] = r.lambda;
    j["edge_term"] = r.edge_term;
    j["node_term"] = r.node_term;
    j["objective"] = r.objective;
    j["d_g"] = r.d_g;
    j["trace"] = trace_json(r.trace);
    j["g1_registered"] = to_document(r.g1_registered);
    j["g2_padded"] = to_document(r.g2_padded);
    return j;
}

// Lines "path,label"; a header line starting with "path" is skipped. Relative
// paths are resolved against the manifest's directory.
void read_manifest(const std::string& path, std::vector<std::string>& ids, std::vector<Graph>& graphs,
                   std::vector<std::string>& labels) {
    std::ifstream in(path);
    internal::require(static_cast<bool>(in), "cannot open " + path);
    const fs::path base = fs::path(path).parent_path();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || (line_no == 1 && line.rfind("path", 0) == 0)) {
            continue;
        }
        const auto comma = line.find(',');
        const std::string file = line.substr(0, comma);
        const std::string label = comma == std::string::npos ? "" : line.substr(comma + 1);
        fs::path p(file);
        if (p.is_relative()) {
            p = base / p;
        }
        ids.push_back(fs::path(file).stem().string());
        graphs.push_back(load_graph(p));
        labels.push_back(label);
    }
    internal::require(!graphs.empty(), path + " lists no graphs");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph-space statistics: registration, distances, means, PCA, sampling"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--lambda", g.lambda, "node attribute weight (>= 0)");
    app.add_option("--solver", g.solver, "faq | umeyama | brute");
    app.add_option("--padding", g.padding, "two_way | one_way | none");
    app.add_option("--seed", g.seed, "master seed");
    app.add_option("--max-iter", g.max_iter, "Frank-Wolfe iteration cap");
    app.add_option("--tol", g.tol, "Frank-Wolfe relative stopping tolerance");
    app.add_option("--restarts", g.restarts, "extra random FAQ starts");
    app.add_option("--init", g.init, "first FAQ start: barycenter | identity | random");
    app.add_flag("--no-refine", g.no_refine, "skip greedy 2-exchange refinement");
    app.add_option("--threads", g.threads, "worker threads (0 = all cores)");

    bool nonconverged = false;
    auto note = [&](bool converged, const std::string& what) {
        if (!converged) {
            nonconverged = true;
            std::cerr << "warning: " << what << " did not converge\n";
        }
    };

    // match
    auto* match = app.add_subcommand("match", "register g1 onto g2");
    std::string m_g1, m_g2, m_out;
    match->add_option("g1", m_g1)->required();
    match->add_option("g2", m_g2)->required();
    match->add_option("-o,--out", m_out, "JSON result (default stdout)");
    match->callback([&] {
        const MatchResult r = graph_distance(load_graph(m_g1), load_graph(m_g2), g.config());
        emit(m_out, dump(match_json(r)));
        note(r.trace.converged, "matching");
    });

    // dist
    auto* dist = app.add_subcommand("dist", "symmetrized pairwise distance matrix as CSV");
    std::vector<std::string> d_inputs;
    std::string d_out;
    dist->add_option("inputs", d_inputs, "graph files or directories")->required();
    dist->add_option("-o,--out", d_out, "CSV output (default stdout)");
    dist->callback([&] {
        const Corpus c = load_corpus(d_inputs);
        const DistanceMatrix dm = pairwise_distances(c.graphs, g.config(), g.threads);
        emit(d_out, matrix_csv(dm.d, c.ids));
        note(dm.nonconverged == 0, std::to_string(dm.nonconverged) + " pair matching(s)");
    });

    // geodesic
    auto* geo = app.add_subcommand("geodesic", "sample the geodesic between two graphs");
    std::string q_g1, q_g2, q_dir = "geodesic";
    int q_steps = 4;
    geo->add_option("g1", q_g1)->required();
    geo->add_option("g2", q_g2)->required();
    geo->add_option("--steps", q_steps, "number of intervals; steps + 1 documents are written")
        ->check(CLI::PositiveNumber);
    geo->add_option("--out-dir", q_dir, "output directory");
    geo->callback([&] {
        const MatchResult r = graph_distance(load_graph(q_g1), load_graph(q_g2), g.config());
        json manifest;
        std::vector<double> times;
        std::vector<std::string> files;
        for (int s = 0; s <= q_steps; ++s) {
            const double t = s == q_steps ? 1.0 : static_cast<double>(s) / q_steps;
            const std::string name = numbered("step_", s, q_steps + 1);
            save_graph(geodesic(r, t), fs::path(q_dir) / name);
            times.push_back(t);
            files.push_back(name);
        }
        manifest["steps"] = q_steps;
        manifest["times"] = times;
        manifest["files"] = files;
        manifest["permutation"] = r.p.images();
        manifest["objective"] = r.objective;
        manifest["d_g"] = r.d_g;
        manifest["converged"] = r.trace.converged;
        write_text_file(fs::path(q_dir) / "manifest.json", dump(manifest));
        note(r.trace.converged, "matching");
    });

    // mean
    auto* mean = app.add_subcommand("mean", "Karcher mean graph");
    std::vector<std::string> k_inputs;
    std::string k_out, k_report;
    int k_outer = 20;
    double k_tol = 1e-8;
    mean->add_option("inputs", k_inputs, "graph files or directories")->required();
    mean->add_option("-o,--out", k_out, "mean GraphDocument (default stdout)");
    mean->add_option("--report", k_report, "JSON with energy trace and registrations");
    mean->add_option("--max-outer", k_outer, "outer iteration cap")->check(CLI::PositiveNumber);
    mean->add_option("--mean-tol", k_tol, "relative energy decrease that ends the iteration");
    mean->callback([&] {
        const Corpus c = load_corpus(k_inputs);
        const GraphMean m = karcher_mean(c.graphs, g.config(), k_outer, k_tol);
        emit(k_out, dump(to_document(m.mu)));
        if (!k_report.empty()) {
            json report;
            report["iterations"] = m.iterations;
            report["converged"] = m.converged;
            report["energy_trace"] = m.energy_trace;
            json perms = json::object();
            for (std::size_t i = 0; i < c.ids.size(); ++i) {
                perms[c.ids[i]] = m.permutations[i].images();
            }
            report["permutations"] = perms;
            write_text_file(k_report, dump(report));
        }
        note(m.converged, "mean iteration");
    });

    // pca
    auto* pca = app.add_subcommand("pca", "principal components of a corpus");
    std::vector<std::string> p_inputs;
    std::string p_out, p_scores;
    Index p_components = 0;
    int p_outer = 20;
    bool p_nodes = false;
    pca->add_option("inputs", p_inputs, "graph files or directories")->required();
    pca->add_option("--components", p_components, "components kept (0 = all)")->check(CLI::NonNegativeNumber);
    pca->add_option("-o,--out", p_out, "PCA model JSON (default stdout)");
    pca->add_option("--scores", p_scores, "per-graph scores as CSV");
    pca->add_option("--max-outer", p_outer, "mean iteration cap")->check(CLI::PositiveNumber);
    pca->add_flag("--include-nodes", p_nodes, "add node attributes to the feature vector");
    pca->callback([&] {
        const Corpus c = load_corpus(p_inputs);
        GraphPcaModel model = graph_pca(c.graphs, g.config(), p_nodes, p_outer);
        if (p_components > 0) {
            internal::require(p_components <= model.components(),
                              "--components " + std::to_string(p_components) + " exceeds the " +
                                  std::to_string(model.components()) + " available");
            model.basis = model.basis.leftCols(p_components).eval();
            model.singular_values = model.singular_values.head(p_components).eval();
            model.explained_variance_ratio = model.explained_variance_ratio.head(p_components).eval();
            model.scores = model.scores.leftCols(p_components).eval();
        }
        emit(p_out, dump(pca_to_json(model)));
        if (!p_scores.empty()) {
            std::ostringstream csv;
            csv << "graph";
            for (Index k = 0; k < model.components(); ++k) {
                csv << ",pc" << (k + 1);
            }
            csv << '\n';
            for (Index r = 0; r < model.scores.rows(); ++r) {
                csv << c.ids[static_cast<std::size_t>(r)];
                for (Index k = 0; k < model.components(); ++k) {
                    csv << ',' << format_double(model.scores(r, k));
                }
                csv << '\n';
            }
            write_text_file(p_scores, csv.str());
        }
        note(model.mean.converged, "mean iteration");
    });

    // sample
    auto* smp = app.add_subcommand("sample", "draw graphs from a Gaussian model on PCA scores");
    std::string s_model, s_dir = "samples";
    Index s_count = 10, s_components = 0;
    double s_threshold = 0.0;
    smp->add_option("--model", s_model, "PCA model JSON")->required();
    smp->add_option("--count", s_count, "number of graphs")->check(CLI::NonNegativeNumber);
    smp->add_option("--threshold", s_threshold, "drop edges with |w| below this")->check(CLI::NonNegativeNumber);
    smp->add_option("--components", s_components, "leading components used (0 = all)")
        ->check(CLI::NonNegativeNumber);
    smp->add_option("--out-dir", s_dir, "output directory");
    smp->callback([&] {
        const GraphPcaModel model = pca_from_json(read_json_file(s_model));
        const Index k = s_components > 0 ? s_components : model.components();
        const GaussianGraphModel gauss = fit_gaussian(model, k, s_threshold);
        const std::vector<Graph> graphs = sample(gauss, g.seed, s_count);
        for (Index i = 0; i < s_count; ++i) {
            save_graph(graphs[static_cast<std::size_t>(i)], fs::path(s_dir) / numbered("sample_", i, s_count));
        }
    });

    // knn
    auto* knn = app.add_subcommand("knn", "k-nearest-neighbour classification under d_g");
    std::string n_train, n_test, n_out;
    Index n_k = 1;
    knn->add_option("--train", n_train, "CSV manifest of path,label")->required();
    knn->add_option("--test", n_test, "CSV manifest of path[,label]")->required();
    knn->add_option("-k,--k", n_k, "neighbours")->check(CLI::PositiveNumber);
    knn->add_option("-o,--out", n_out, "predictions CSV (default stdout)");
    knn->callback([&] {
        std::vector<std::string> train_ids, train_labels, test_ids, test_labels;
        std::vector<Graph> train, test;
        read_manifest(n_train, train_ids, train, train_labels);
        read_manifest(n_test, test_ids, test, test_labels);
        const KnnResult r = knn_classify(train, train_labels, test, n_k, g.config(), g.threads);
        std::ostringstream csv;
        csv << "graph,predicted,label\n";
        for (std::size_t i = 0; i < test.size(); ++i) {
            csv << test_ids[i] << ',' << r.predicted[i] << ',' << test_labels[i] << '\n';
        }
        emit(n_out, csv.str());
        const bool labelled =
            std::all_of(test_labels.begin(), test_labels.end(), [](const std::string& l) { return !l.empty(); });
        if (labelled) {
            std::cerr << "accuracy " << format_double(accuracy(r.predicted, test_labels)) << '\n';
        }
        note(r.nonconverged == 0, std::to_string(r.nonconverged) + " pair matching(s)");
    });

    // bench-recovery
    auto* bench = app.add_subcommand("bench-recovery", "exact-registration rate on relabelled random graphs");
    GeneratorSpec b_spec;
    std::string b_family = "full_heavy_tailed", b_out;
    Index b_trials = 200;
    bool b_timing = false;
    bench->add_option("--family", b_family, "binomial | full_heavy_tailed | letter_like");
    bench->add_option("--n-min", b_spec.n_min, "smallest graph");
    bench->add_option("--n-max", b_spec.n_max, "largest graph");
    bench->add_option("--p", b_spec.p, "binomial edge probability");
    bench->add_option("--letter", b_spec.letter, "letter prototype");
    bench->add_option("--trials", b_trials, "number of trials")->check(CLI::PositiveNumber);
    bench->add_flag("--timing", b_timing, "include wall-clock statistics in the report");
    bench->add_option("-o,--out", b_out, "RecoveryReport JSON (default stdout)");
    bench->callback([&] {
        b_spec.family = parse_family(b_family);
        const RecoveryReport r = bench_recovery(b_spec, b_trials, g.config(), g.seed, g.threads);
        emit(b_out, dump(recovery_report_json(r, b_timing)));
        std::cerr << "wall time " << format_double(r.wall_time.total) << " s (summed over trials)\n";
        note(r.nonconverged_trials == 0, std::to_string(r.nonconverged_trials) + " trial(s)");
    });

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic corpus");
    GeneratorSpec gen_spec;
    std::string gen_family = "binomial", gen_dir = "corpus", gen_prefix = "g_";
    Index gen_count = 10;
    gen->add_option("--family", gen_family, "binomial | full_heavy_tailed | letter_like");
    gen->add_option("--count", gen_count, "number of graphs")->check(CLI::NonNegativeNumber);
    gen->add_option("--n-min", gen_spec.n_min, "smallest graph");
    gen->add_option("--n-max", gen_spec.n_max, "largest graph");
    gen->add_option("--p", gen_spec.p, "binomial edge probability");
    gen->add_option("--letter", gen_spec.letter, "letter prototype");
    gen->add_option("--coord-noise", gen_spec.coord_noise, "coordinate noise standard deviation");
    gen->add_option("--edge-noise", gen_spec.edge_noise, "edge deletion probability");
    gen->add_option("--out-dir", gen_dir, "output directory");
    gen->add_option("--prefix", gen_prefix, "file name prefix");
    gen->callback([&] {
        gen_spec.family = parse_family(gen_family);
        const std::vector<Graph> corpus = generate_corpus(gen_spec, g.seed, gen_count);
        for (Index i = 0; i < gen_count; ++i) {
            save_graph(corpus[static_cast<std::size_t>(i)], fs::path(gen_dir) / numbered(gen_prefix, i, gen_count));
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return nonconverged ? 3 : 0;
}
