#ifndef GRAPHSPACE_PIPELINES_HPP
#define GRAPHSPACE_PIPELINES_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "graphspace/assignment.hpp"
#include "graphspace/errors.hpp"
#include "graphspace/generate.hpp"
#include "graphspace/graph.hpp"
#include "graphspace/matching.hpp"
#include "graphspace/parallel.hpp"

namespace graphspace {

struct RecoveryTrial {
    Index n = 0;
    bool success = false;
    bool converged = true;
    double objective = 0.0;
    /// objective minus the exhaustive optimum; NaN when n exceeds the oracle limit.
    double gap = std::numeric_limits<double>::quiet_NaN();
    double seconds = 0.0;
};

struct WallTimeStats {
    double total = 0.0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct RecoveryReport {
    GeneratorSpec spec;
    Index trials = 0;
    Index successes = 0;
    double fraction_exact_registration = 0.0;
    Index oracle_trials = 0;
    Index zero_gap_trials = 0;
    double mean_objective_gap_vs_oracle = std::numeric_limits<double>::quiet_NaN();
    double max_objective_gap_vs_oracle = std::numeric_limits<double>::quiet_NaN();
    double min_objective_gap_vs_oracle = std::numeric_limits<double>::quiet_NaN();
    Index nonconverged_trials = 0;
    WallTimeStats wall_time;
    std::vector<RecoveryTrial> details;
};

inline constexpr Index kRecoveryOracleMaxNodes = 8;

/// Registration recovery benchmark. Trial t draws g from the stream derive_seed(seed, t),
/// relabels it with a random permutation p and registers g onto the relabelled
/// copy. A trial succeeds when every real node of g is sent to its image under p.
/// For n <= 8 the objective is compared with exhaustive search over the
/// unpadded pair.
inline RecoveryReport bench_recovery(const GeneratorSpec& spec, Index trials, const MatchConfig& cfg,
                                     std::uint64_t seed, unsigned threads = 0) {
    internal::require(trials >= 1, "bench_recovery needs at least one trial");
    spec.validate();
    cfg.validate();
    RecoveryReport report;
    report.spec = spec;
    report.trials = trials;
    report.details.resize(static_cast<std::size_t>(trials));

    parallel_for(
        static_cast<std::size_t>(trials),
        [&](std::size_t t) {
            const auto start = std::chrono::steady_clock::now();
            std::mt19937_64 rng(derive_seed(seed, t));
            const Graph g = generate(spec, rng);
            const Permutation truth = random_permutation(g.size(), rng);
            const Graph g2 = permute(g, truth);
            MatchConfig trial_cfg = cfg;
            trial_cfg.seed = rng();
            const MatchResult r = graph_distance(g, g2, trial_cfg);

            RecoveryTrial& out = report.details[t];
            out.n = g.size();
            out.converged = r.trace.converged;
            out.objective = r.objective;
            out.success = true;
            for (Index i = 0; i < g.size(); ++i) {
                if (r.p[i] != truth[i]) {
                    out.success = false;
                    break;
                }
            }
            if (g.size() <= kRecoveryOracleMaxNodes) {
                out.gap = r.objective - brute_force_match(g, g2, cfg.lambda).best.objective;
            }
            out.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        },
        threads);

    double gap_sum = 0.0;
    report.wall_time.min = std::numeric_limits<double>::infinity();
    for (const RecoveryTrial& t : report.details) {
        report.successes += t.success ? 1 : 0;
        report.nonconverged_trials += t.converged ? 0 : 1;
        if (!std::isnan(t.gap)) {
            if (report.oracle_trials == 0) {
                report.max_objective_gap_vs_oracle = t.gap;
                report.min_objective_gap_vs_oracle = t.gap;
            }
            ++report.oracle_trials;
            report.zero_gap_trials += t.gap == 0.0 ? 1 : 0;
            gap_sum += t.gap;
            report.max_objective_gap_vs_oracle = std::max(report.max_objective_gap_vs_oracle, t.gap);
            report.min_objective_gap_vs_oracle = std::min(report.min_objective_gap_vs_oracle, t.gap);
        }
        report.wall_time.total += t.seconds;
        report.wall_time.min = std::min(report.wall_time.min, t.seconds);
        report.wall_time.max = std::max(report.wall_time.max, t.seconds);
    }
    report.fraction_exact_registration =
        static_cast<double>(report.successes) / static_cast<double>(trials);
    if (report.oracle_trials > 0) {
        report.mean_objective_gap_vs_oracle = gap_sum / static_cast<double>(report.oracle_trials);
    }
    report.wall_time.mean = report.wall_time.total / static_cast<double>(trials);
    return report;
}

struct DistanceMatrix {
    Matrix d;
    Index nonconverged = 0;
};

/// Symmetrized distances min(d_g(i -> j), d_g(j -> i)) with a zero diagonal.
inline DistanceMatrix pairwise_distances(const std::vector<Graph>& corpus, const MatchConfig& cfg,
                                         unsigned threads = 0) {
    cfg.validate();
    const auto n = static_cast<Index>(corpus.size());
    std::vector<std::pair<Index, Index>> pairs;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            pairs.emplace_back(i, j);
        }
    }
    std::vector<double> value(pairs.size());
    std::vector<char> converged(pairs.size());
    parallel_for(
        pairs.size(),
        [&](std::size_t k) {
            const auto [i, j] = pairs[k];
            const MatchResult forward = graph_distance(corpus[static_cast<std::size_t>(i)],
                                                       corpus[static_cast<std::size_t>(j)], cfg);
            const MatchResult backward = graph_distance(corpus[static_cast<std::size_t>(j)],
                                                        corpus[static_cast<std::size_t>(i)], cfg);
            value[k] = std::min(forward.d_g, backward.d_g);
            converged[k] = forward.trace.converged && backward.trace.converged;
        },
        threads);
    DistanceMatrix out;
    out.d = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [i, j] = pairs[k];
        out.d(i, j) = out.d(j, i) = value[k];
        out.nonconverged += converged[k] ? 0 : 1;
    }
    return out;
}

/// Symmetrized distances between every test graph (rows) and training graph (columns).
inline DistanceMatrix cross_distances(const std::vector<Graph>& test, const std::vector<Graph>& train,
                                      const MatchConfig& cfg, unsigned threads = 0) {
    cfg.validate();
    const std::size_t cols = train.size();
    std::vector<double> value(test.size() * cols);
    std::vector<char> converged(value.size());
    parallel_for(
        value.size(),
        [&](std::size_t k) {
            const Graph& a = test[k / cols];
            const Graph& b = train[k % cols];
            const MatchResult forward = graph_distance(a, b, cfg);
            const MatchResult backward = graph_distance(b, a, cfg);
            value[k] = std::min(forward.d_g, backward.d_g);
            converged[k] = forward.trace.converged && backward.trace.converged;
        },
        threads);
    DistanceMatrix out;
    out.d = Matrix(static_cast<Index>(test.size()), static_cast<Index>(cols));
    for (std::size_t k = 0; k < value.size(); ++k) {
        out.d(static_cast<Index>(k / cols), static_cast<Index>(k % cols)) = value[k];
        out.nonconverged += converged[k] ? 0 : 1;
    }
    return out;
}

struct KnnResult {
    std::vector<std::string> predicted;
    /// test x train symmetrized distances.
    Matrix distances;
    Index nonconverged = 0;
};

/// Majority vote among the k nearest training graphs (nearer index first on
/// equal distance). Ties between labels go to the smaller mean neighbour
/// distance, then to the lexicographically smaller label.
inline std::vector<std::string> knn_vote(const Matrix& distances, const std::vector<std::string>& labels,
                                         Index k) {
    const Index train = distances.cols();
    internal::require(static_cast<Index>(labels.size()) == train, "one label per training graph is required");
    internal::require(k >= 1 && k <= train,
                      "k must lie in [1, " + std::to_string(train) + "], got " + std::to_string(k));
    std::vector<std::string> out;
    std::vector<Index> order(static_cast<std::size_t>(train));
    for (Index r = 0; r < distances.rows(); ++r) {
        std::iota(order.begin(), order.end(), Index{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](Index a, Index b) { return distances(r, a) < distances(r, b); });
        std::map<std::string, std::pair<Index, double>> tally;
        for (Index q = 0; q < k; ++q) {
            const Index c = order[static_cast<std::size_t>(q)];
            auto& entry = tally[labels[static_cast<std::size_t>(c)]];
            entry.first += 1;
            entry.second += distances(r, c);
        }
        const std::string* best = nullptr;
        Index best_votes = 0;
        double best_mean = 0.0;
        for (const auto& [label, entry] : tally) {
            const double mean = entry.second / static_cast<double>(entry.first);
            if (best == nullptr || entry.first > best_votes ||
                (entry.first == best_votes && mean < best_mean)) {
                best = &label;
                best_votes = entry.first;
                best_mean = mean;
            }
        }
        out.push_back(*best);
    }
    return out;
}

inline KnnResult knn_classify(const std::vector<Graph>& train, const std::vector<std::string>& labels,
                              const std::vector<Graph>& test, Index k, const MatchConfig& cfg,
                              unsigned threads = 0) {
    internal::require(train.size() == labels.size(), "one label per training graph is required");
    internal::require(!train.empty(), "the training corpus is empty");
    KnnResult out;
    DistanceMatrix dm = cross_distances(test, train, cfg, threads);
    out.predicted = knn_vote(dm.d, labels, k);
    out.distances = std::move(dm.d);
    out.nonconverged = dm.nonconverged;
    return out;
}

inline double accuracy(const std::vector<std::string>& predicted, const std::vector<std::string>& truth) {
    internal::require(predicted.size() == truth.size() && !truth.empty(),
                      "accuracy needs equally many predictions and labels");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        hits += predicted[i] == truth[i] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace graphspace

#endif
