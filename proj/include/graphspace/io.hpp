#ifndef GRAPHSPACE_IO_HPP
#define GRAPHSPACE_IO_HPP

// JSON graph documents, distance-matrix CSV and PCA model files.
//
// GraphDocument:
//   {"directed": bool,
//    "nodes": [{"id": 0, "attr": [x, y, ...]}, ...],     // "attr" optional, all or none
//    "edges": [{"i": 0, "j": 1, "w": 1.0}, ...]}
// Undirected documents list each edge once with i < j. Padding nodes written by
// this library carry "null": true.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "graphspace/errors.hpp"
#include "graphspace/graph.hpp"
#include "graphspace/pipelines.hpp"
#include "graphspace/stats.hpp"

namespace graphspace {

using json = nlohmann::ordered_json;

inline json to_document(const Graph& g) {
    json doc;
    doc["directed"] = g.directed();
    json nodes = json::array();
    for (Index i = 0; i < g.size(); ++i) {
        json node;
        node["id"] = i;
        if (g.has_attributes()) {
            std::vector<double> attr(static_cast<std::size_t>(g.attribute_dim()));
            for (Index c = 0; c < g.attribute_dim(); ++c) {
                attr[static_cast<std::size_t>(c)] = g.attributes()(i, c);
            }
            node["attr"] = attr;
        }
        if (g.is_null(i)) {
            node["null"] = true;
        }
        nodes.push_back(std::move(node));
    }
    doc["nodes"] = std::move(nodes);
    json edges = json::array();
    const Matrix& a = g.adjacency();
    for (Index i = 0; i < g.size(); ++i) {
        for (Index j = g.directed() ? 0 : i + 1; j < g.size(); ++j) {
            if (i != j && a(i, j) != 0.0) {
                edges.push_back({{"i", i}, {"j", j}, {"w", a(i, j)}});
            }
        }
    }
    doc["edges"] = std::move(edges);
    return doc;
}

namespace internal {

inline double finite_number(const json& v, const std::string& where) {
    require(v.is_number(), where + " must be a number");
    const double x = v.get<double>();
    require(std::isfinite(x), where + " is not finite");
    return x;
}

inline Index index_field(const json& obj, const char* key, const std::string& where) {
    require(obj.contains(key), where + " is missing \"" + key + "\"");
    const json& v = obj.at(key);
    require(v.is_number_integer(), where + " field \"" + key + "\" must be an integer");
    return v.get<Index>();
}

}  // namespace internal

inline Graph from_document(const json& doc) {
    using internal::require;
    require(doc.is_object(), "graph document must be a JSON object");
    bool directed = false;
    if (doc.contains("directed")) {
        require(doc.at("directed").is_boolean(), "\"directed\" must be a boolean");
        directed = doc.at("directed").get<bool>();
    }
    require(doc.contains("nodes") && doc.at("nodes").is_array(), "\"nodes\" must be an array");
    const json& nodes = doc.at("nodes");
    const auto n = static_cast<Index>(nodes.size());

    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<bool> null_mask(static_cast<std::size_t>(n), false);
    std::vector<std::vector<double>> attrs(static_cast<std::size_t>(n));
    int with_attr = 0;
    Index attr_dim = -1;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const json& node = nodes[k];
        const std::string where = "node " + std::to_string(k);
        require(node.is_object(), where + " must be an object");
        const Index id = internal::index_field(node, "id", where);
        require(id >= 0 && id < n, where + " has id " + std::to_string(id) +
                                       " outside 0.." + std::to_string(n - 1));
        require(!seen[static_cast<std::size_t>(id)], "node id " + std::to_string(id) + " is repeated");
        seen[static_cast<std::size_t>(id)] = true;
        const std::string node_where = "node " + std::to_string(id);
        if (node.contains("null")) {
            require(node.at("null").is_boolean(), node_where + " field \"null\" must be a boolean");
            null_mask[static_cast<std::size_t>(id)] = node.at("null").get<bool>();
        }
        if (node.contains("attr")) {
            const json& attr = node.at("attr");
            require(attr.is_array() && !attr.empty(), node_where + " \"attr\" must be a non-empty array");
            if (attr_dim < 0) {
                attr_dim = static_cast<Index>(attr.size());
            }
            require(static_cast<Index>(attr.size()) == attr_dim,
                    node_where + " has attribute length " + std::to_string(attr.size()) +
                        ", expected " + std::to_string(attr_dim));
            auto& dst = attrs[static_cast<std::size_t>(id)];
            for (std::size_t c = 0; c < attr.size(); ++c) {
                dst.push_back(internal::finite_number(attr[c], node_where + " attr[" + std::to_string(c) + "]"));
            }
            ++with_attr;
        }
    }
    require(with_attr == 0 || with_attr == n, "either every node or no node must carry \"attr\"");

    Matrix a = Matrix::Zero(n, n);
    std::vector<bool> present(static_cast<std::size_t>(n * n), false);
    if (doc.contains("edges")) {
        const json& edges = doc.at("edges");
        require(edges.is_array(), "\"edges\" must be an array");
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const json& e = edges[k];
            std::string where = "edge " + std::to_string(k);
            require(e.is_object(), where + " must be an object");
            Index i = internal::index_field(e, "i", where);
            Index j = internal::index_field(e, "j", where);
            where += " (" + std::to_string(i) + "," + std::to_string(j) + ")";
            require(i >= 0 && i < n && j >= 0 && j < n, where + " references a missing node");
            require(i != j, where + " is a self-loop");
            require(e.contains("w"), where + " is missing \"w\"");
            const double w = internal::finite_number(e.at("w"), where + " weight");
            if (!directed && i > j) {
                std::swap(i, j);
            }
            const auto slot = static_cast<std::size_t>(i * n + j);
            require(!present[slot], where + " duplicates an earlier edge");
            present[slot] = true;
            a(i, j) = w;
            if (!directed) {
                a(j, i) = w;
            }
        }
    }

    std::optional<Matrix> attr_matrix;
    if (with_attr > 0) {
        attr_matrix = Matrix(n, attr_dim);
        for (Index i = 0; i < n; ++i) {
            for (Index c = 0; c < attr_dim; ++c) {
                (*attr_matrix)(i, c) = attrs[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
            }
        }
    }
    return Graph(std::move(a), directed, std::move(attr_matrix), std::move(null_mask));
}

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    internal::require(static_cast<bool>(in), "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": malformed JSON: " + e.what());
    }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    internal::require(static_cast<bool>(out), "cannot write " + path.string());
    out << text;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline Graph load_graph(const std::filesystem::path& path) {
    const json doc = read_json_file(path);
    try {
        return from_document(doc);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

inline void save_graph(const Graph& g, const std::filesystem::path& path) {
    write_text_file(path, dump(to_document(g)));
}

/// Shortest text that round-trips the double.
inline std::string format_double(double x) {
    char buf[32];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, x);
        if (std::strtod(buf, nullptr) == x) {
            break;
        }
    }
    return buf;
}

/// Square matrix with a header row and a leading id column.
inline std::string matrix_csv(const Matrix& m, const std::vector<std::string>& ids) {
    internal::require(static_cast<Index>(ids.size()) == m.rows() && m.rows() == m.cols(),
                      "distance matrix and id list disagree");
    std::ostringstream out;
    out << "graph";
    for (const auto& id : ids) {
        out << ',' << id;
    }
    out << '\n';
    for (Index i = 0; i < m.rows(); ++i) {
        out << ids[static_cast<std::size_t>(i)];
        for (Index j = 0; j < m.cols(); ++j) {
            out << ',' << format_double(m(i, j));
        }
        out << '\n';
    }
    return out.str();
}

namespace internal {

inline json vector_json(const Vector& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline json rows_json(const Matrix& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        rows.push_back(vector_json(m.row(r).transpose()));
    }
    return rows;
}

inline Vector vector_from(const json& j, const std::string& what) {
    require(j.is_array(), what + " must be an array");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        v(static_cast<Index>(k)) = finite_number(j[k], what + "[" + std::to_string(k) + "]");
    }
    return v;
}

inline Matrix rows_from(const json& j, Index cols, const std::string& what) {
    require(j.is_array(), what + " must be an array of rows");
    Matrix m(static_cast<Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const Vector row = vector_from(j[r], what + "[" + std::to_string(r) + "]");
        require(row.size() == cols, what + " row " + std::to_string(r) + " has the wrong length");
        m.row(static_cast<Index>(r)) = row.transpose();
    }
    return m;
}

}  // namespace internal

/// Mean graph document, basis vectors (one array per component), singular
/// values, per-sample scores and the bookkeeping needed to reconstruct.
inline json pca_to_json(const GraphPcaModel& model) {
    json j;
    j["format"] = "graphspace-pca";
    j["template_size"] = model.template_size;
    j["directed"] = model.directed;
    j["include_nodes"] = model.include_nodes;
    j["attr_dim"] = model.attr_dim;
    j["node_weight"] = model.node_weight;
    j["nonnegative"] = model.nonnegative;
    j["sample_count"] = model.sample_count;
    j["mean"] = to_document(model.mean.mu);
    j["energy_trace"] = model.mean.energy_trace;
    j["center"] = internal::vector_json(model.center);
    j["singular_values"] = internal::vector_json(model.singular_values);
    j["explained_variance_ratio"] = internal::vector_json(model.explained_variance_ratio);
    j["basis"] = internal::rows_json(model.basis.transpose());
    j["scores"] = internal::rows_json(model.scores);
    return j;
}

inline GraphPcaModel pca_from_json(const json& j) {
    using internal::require;
    try {
        require(j.is_object() && j.value("format", "") == "graphspace-pca",
                "not a graphspace PCA model file");
        GraphPcaModel model;
        model.template_size = j.at("template_size").get<Index>();
        model.directed = j.at("directed").get<bool>();
        model.include_nodes = j.at("include_nodes").get<bool>();
        model.attr_dim = j.at("attr_dim").get<Index>();
        model.node_weight = j.at("node_weight").get<double>();
        model.nonnegative = j.at("nonnegative").get<bool>();
        model.sample_count = j.at("sample_count").get<Index>();
        model.mean.mu = from_document(j.at("mean"));
        if (j.contains("energy_trace")) {
            model.mean.energy_trace = j.at("energy_trace").get<std::vector<double>>();
        }
        require(model.mean.mu.size() == model.template_size, "mean graph size disagrees with template_size");
        model.center = internal::vector_from(j.at("center"), "center");
        require(model.center.size() == model.feature_count(), "center has the wrong length");
        model.singular_values = internal::vector_from(j.at("singular_values"), "singular_values");
        model.explained_variance_ratio =
            internal::vector_from(j.at("explained_variance_ratio"), "explained_variance_ratio");
        const Index comps = model.singular_values.size();
        model.basis = internal::rows_from(j.at("basis"), model.feature_count(), "basis").transpose();
        require(model.basis.cols() == comps, "basis and singular values disagree");
        model.scores = internal::rows_from(j.at("scores"), comps, "scores");
        return model;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed PCA model: ") + e.what());
    }
}

/// Wall times vary between runs, so they are written only on request.
inline json recovery_report_json(const RecoveryReport& r, bool include_timing) {
    json j;
    j["graph_family"] = family_name(r.spec.family);
    if (r.spec.family == Family::binomial) {
        j["p"] = r.spec.p;
    }
    if (r.spec.family == Family::letter_like) {
        j["letter"] = std::string(1, r.spec.letter);
        j["coord_noise"] = r.spec.coord_noise;
        j["edge_noise"] = r.spec.edge_noise;
    } else {
        j["size_range"] = {r.spec.n_min, r.spec.n_max};
    }
    j["trials"] = r.trials;
    j["successes"] = r.successes;
    j["fraction_exact_registration"] = r.fraction_exact_registration;
    j["oracle_max_nodes"] = kRecoveryOracleMaxNodes;
    j["oracle_trials"] = r.oracle_trials;
    j["zero_gap_trials"] = r.zero_gap_trials;
    auto number_or_null = [](double x) { return std::isnan(x) ? json(nullptr) : json(x); };
    j["mean_objective_gap_vs_oracle"] = number_or_null(r.mean_objective_gap_vs_oracle);
    j["min_objective_gap_vs_oracle"] = number_or_null(r.min_objective_gap_vs_oracle);
    j["max_objective_gap_vs_oracle"] = number_or_null(r.max_objective_gap_vs_oracle);
    j["nonconverged_trials"] = r.nonconverged_trials;
    if (include_timing) {
        j["wall_time_stats"] = {{"total_s", r.wall_time.total},
                                {"mean_s", r.wall_time.mean},
                                {"min_s", r.wall_time.min},
                                {"max_s", r.wall_time.max}};
    }
    return j;
}

}  // namespace graphspace

#endif
