#pragma once

// File formats. All vertex labels in files are 1-based.
//
//   graph        {"p": int, "directed": [[i,j],...], "multi": [[i1,...,ik],...]}
//   LSEM spec    graph fields plus "B" (p x p, B[i][j] = effect of i on j),
//                "loadings" (one list per multi edge, aligned with its sorted
//                vertices), "noise": {"observed": [...], "hidden": [...]}
//                (or one tag string for every source), optional "seed".
//   first stage  {"p": int, "directed": [...], "bidirected": [[i,j],...], "B": [[...]]}
//   tensor       {"order": k, "p": p, "entries": [{"idx": [...], "value": x}]}
//   dataset CSV  one line per variable: label,x1,x2,...,xn
//   dataset bin  16-byte header "MBD1", uint32 p, uint64 n (little endian),
//                then p*n little-endian doubles, row-major

#include "cumulants.hpp"
#include "discovery.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "lsem.hpp"
#include "matrix.hpp"
#include "noise.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace mbang::io {

using nlohmann::json;

inline constexpr const char* b_convention = "B[i][j] is the direct effect of vertex i on vertex j (row = cause)";

namespace detail {

inline json edges_to_json(const std::vector<Edge>& edges)
{
    json out = json::array();
    for (const auto& [a, b] : edges) out.push_back({a + 1, b + 1});
    return out;
}

inline json sets_to_json(const std::vector<VertexSet>& sets)
{
    json out = json::array();
    for (const auto& s : sets) {
        json row = json::array();
        for (Vertex v : s) row.push_back(v + 1);
        out.push_back(std::move(row));
    }
    return out;
}

inline json matrix_to_json(const Matrix& m)
{
    json out = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        out.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return out;
}

inline const json& require(const json& j, const char* key, const char* context)
{
    if (!j.is_object() || !j.contains(key))
        throw ValidationError(std::string(context) + ": missing field \"" + key + "\"");
    return j.at(key);
}

inline int require_p(const json& j, const char* context)
{
    const auto& v = require(j, "p", context);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ValidationError(std::string(context) + ": \"p\" must be a non-negative integer");
    return v.get<int>();
}

inline std::vector<Vertex> vertex_list(const json& j, const char* context)
{
    if (!j.is_array()) throw ValidationError(std::string(context) + ": expected an array of vertex labels");
    std::vector<Vertex> out;
    for (const auto& v : j) {
        if (!v.is_number_integer()) throw ValidationError(std::string(context) + ": vertex labels must be integers");
        out.push_back(v.get<int>() - 1);
    }
    return out;
}

inline std::vector<Edge> edges_from_json(const json& j, const char* context)
{
    if (!j.is_array()) throw ValidationError(std::string(context) + ": expected an array of pairs");
    std::vector<Edge> out;
    for (const auto& e : j) {
        auto v = vertex_list(e, context);
        if (v.size() != 2) throw ValidationError(std::string(context) + ": each edge needs exactly two vertices");
        out.emplace_back(v[0], v[1]);
    }
    return out;
}

inline std::vector<VertexSet> sets_from_json(const json& j, const char* context)
{
    if (!j.is_array()) throw ValidationError(std::string(context) + ": expected an array of vertex lists");
    std::vector<VertexSet> out;
    for (const auto& e : j) out.push_back(vertex_list(e, context));
    return out;
}

inline Matrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols, const char* context)
{
    if (!j.is_array() || j.size() != rows)
        throw ValidationError(std::string(context) + ": expected " + std::to_string(rows) + " rows");
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& r = j[i];
        if (!r.is_array() || r.size() != cols)
            throw ValidationError(std::string(context) + ": row " + std::to_string(i + 1) + " needs " +
                                  std::to_string(cols) + " entries");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!r[c].is_number()) throw ValidationError(std::string(context) + ": non-numeric entry");
            m(i, c) = r[c].get<double>();
        }
    }
    return m;
}

} // namespace detail

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << text;
}

// --- graphs ---------------------------------------------------------------

inline json to_json(const MixedGraph& g)
{
    return {{"p", g.p()},
            {"directed", detail::edges_to_json(g.directed())},
            {"multi", detail::sets_to_json(g.multi())}};
}

inline MixedGraph graph_from_json(const json& j)
{
    int p = detail::require_p(j, "graph");
    auto directed = j.contains("directed") ? detail::edges_from_json(j.at("directed"), "graph.directed")
                                           : std::vector<Edge>{};
    auto multi = j.contains("multi") ? detail::sets_from_json(j.at("multi"), "graph.multi") : std::vector<VertexSet>{};
    return MixedGraph(p, std::move(directed), std::move(multi));
}

// --- LSEM specs -----------------------------------------------------------

inline json to_json(const LsemSpec& spec)
{
    json j = to_json(spec.graph);
    j["B_convention"] = b_convention;
    j["B"] = detail::matrix_to_json(spec.B);
    j["loadings"] = spec.loadings;
    json observed = json::array(), hidden = json::array();
    for (int v = 0; v < spec.p(); ++v) observed.push_back(spec.observed_noise(v).to_string());
    for (std::size_t e = 0; e < spec.hidden_count(); ++e) hidden.push_back(spec.hidden_noise(e).to_string());
    j["noise"] = {{"observed", observed}, {"hidden", hidden}};
    return j;
}

inline LsemSpec spec_from_json(const json& j)
{
    LsemSpec spec;
    spec.graph = graph_from_json(j);
    const auto p = static_cast<std::size_t>(spec.graph.p());
    const std::size_t m = spec.graph.multi().size();
    spec.B = j.contains("B") ? detail::matrix_from_json(j.at("B"), p, p, "spec.B") : Matrix(p, p);
    auto raw = j.contains("multi") ? detail::sets_from_json(j.at("multi"), "graph.multi") : std::vector<VertexSet>{};
    if (raw.size() != m) throw ValidationError("spec: duplicate multidirected edges");
    std::vector<std::vector<double>> loadings;
    if (j.contains("loadings")) {
        const auto& l = j.at("loadings");
        if (!l.is_array() || l.size() != m) throw ValidationError("spec.loadings: need one list per multidirected edge");
        for (std::size_t e = 0; e < m; ++e) {
            const auto& row = l[e];
            if (!row.is_array() || row.size() != raw[e].size())
                throw ValidationError("spec.loadings: entry " + std::to_string(e + 1) +
                                      " does not match its multidirected edge");
            std::vector<double> r;
            for (const auto& x : row) {
                if (!x.is_number()) throw ValidationError("spec.loadings: non-numeric entry");
                r.push_back(x.get<double>());
            }
            loadings.push_back(std::move(r));
        }
    } else {
        for (const auto& h : raw) loadings.emplace_back(h.size(), 1.0);
    }
    // Loadings are listed against the edges as written; reorder to the graph's
    // canonical (sorted) edge and member order.
    spec.loadings.assign(m, {});
    for (std::size_t e = 0; e < m; ++e) {
        std::vector<std::pair<Vertex, double>> members;
        for (std::size_t k = 0; k < raw[e].size(); ++k) members.emplace_back(raw[e][k], loadings[e][k]);
        std::sort(members.begin(), members.end());
        VertexSet key;
        std::vector<double> vals;
        for (const auto& [v, x] : members) {
            key.push_back(v);
            vals.push_back(x);
        }
        auto it = std::find(spec.graph.multi().begin(), spec.graph.multi().end(), key);
        spec.loadings[static_cast<std::size_t>(it - spec.graph.multi().begin())] = std::move(vals);
    }
    const auto& noise = detail::require(j, "noise", "spec");
    if (noise.is_string()) {
        spec.noise.assign(p + m, NoiseSpec::parse(noise.get<std::string>()));
    } else {
        auto tags = [](const json& arr, const char* what) {
            if (!arr.is_array()) throw ValidationError(std::string("spec.noise.") + what + ": expected an array");
            std::vector<NoiseSpec> out;
            for (const auto& t : arr) {
                if (!t.is_string()) throw ValidationError(std::string("spec.noise.") + what + ": expected strings");
                out.push_back(NoiseSpec::parse(t.get<std::string>()));
            }
            return out;
        };
        spec.noise = tags(detail::require(noise, "observed", "spec.noise"), "observed");
        auto hidden = noise.contains("hidden") ? tags(noise.at("hidden"), "hidden") : std::vector<NoiseSpec>{};
        spec.noise.insert(spec.noise.end(), hidden.begin(), hidden.end());
    }
    validate(spec);
    return spec;
}

/// FNV-1a over the canonical JSON text; printed for provenance.
inline std::uint64_t spec_hash(const LsemSpec& spec)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : to_json(spec).dump()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// --- first stage ----------------------------------------------------------

inline json to_json(const FirstStageResult& stage)
{
    return {{"p", stage.bidirected.p()},
            {"directed", detail::edges_to_json(stage.directed)},
            {"bidirected", detail::edges_to_json(stage.bidirected.pairs())},
            {"B", detail::matrix_to_json(stage.B_hat)}};
}

/// Parse a first-stage result. Bows raise in strict mode; otherwise they are
/// appended to `warnings`.
inline FirstStageResult first_stage_from_json(const json& j, bool strict = true,
                                              std::vector<std::string>* warnings = nullptr)
{
    int p = detail::require_p(j, "first stage");
    FirstStageResult stage;
    stage.directed = detail::edges_from_json(detail::require(j, "directed", "first stage"), "first stage.directed");
    stage.bidirected =
        BidirectedGraph(p, detail::edges_from_json(detail::require(j, "bidirected", "first stage"), "first stage.bidirected"));
    const auto q = static_cast<std::size_t>(p);
    stage.B_hat = detail::matrix_from_json(detail::require(j, "B", "first stage"), q, q, "first stage.B");
    validate(stage, strict);
    if (!strict && warnings) {
        for (const auto& [a, b] : find_bows(stage))
            warnings->push_back("bow between " + std::to_string(a + 1) + " and " + std::to_string(b + 1));
    }
    return stage;
}

inline FirstStageResult load_external_first_stage(const std::string& path, bool strict = true,
                                                  std::vector<std::string>* warnings = nullptr)
{
    try {
        return first_stage_from_json(read_json_file(path), strict, warnings);
    } catch (const ValidationError& e) {
        std::string what = e.what();
        if (what.rfind(path, 0) == 0) throw;
        throw ValidationError(path + ": " + what);
    }
}

// --- tensors --------------------------------------------------------------

inline json to_json(const CumulantTensor& t)
{
    json entries = json::array();
    for (const auto& [idx, value] : t.entries()) {
        json i = json::array();
        for (Vertex v : idx) i.push_back(v + 1);
        entries.push_back({{"idx", i}, {"value", value}});
    }
    return {{"order", t.order()}, {"p", t.p()}, {"entries", entries}};
}

inline CumulantTensor tensor_from_json(const json& j)
{
    const auto& order = detail::require(j, "order", "tensor");
    if (!order.is_number_integer()) throw ValidationError("tensor: \"order\" must be an integer");
    CumulantTensor t(order.get<int>(), detail::require_p(j, "tensor"));
    for (const auto& e : detail::require(j, "entries", "tensor")) {
        auto idx = detail::vertex_list(detail::require(e, "idx", "tensor entry"), "tensor entry");
        if (static_cast<int>(idx.size()) != t.order()) throw ValidationError("tensor entry has the wrong order");
        for (Vertex v : idx) mbang::detail::check_vertex(v, t.p(), "tensor entry");
        t.set(idx, detail::require(e, "value", "tensor entry").get<double>());
    }
    return t;
}

// --- discovery output -----------------------------------------------------

inline const char* to_string(RelaxedTest r)
{
    switch (r) {
    case RelaxedTest::off: return "off";
    case RelaxedTest::listing: return "listing";
    case RelaxedTest::prose: return "prose";
    }
    return "";
}

inline json to_json(const DiscoveryResult& result, const DiscoveryConfig& cfg)
{
    json j = to_json(result.graph);
    j["B_convention"] = b_convention;
    j["B_hat"] = detail::matrix_to_json(result.B_hat);
    j["config"] = {{"cumulant_tolerance", cfg.cumulant_tolerance},
                   {"standardize", cfg.standardize},
                   {"relaxed_test", to_string(cfg.relaxed)},
                   {"zero_test", cfg.zero_test == ZeroTestMode::exact ? "exact" : "threshold"}};
    json diag = json::array();
    for (const auto& e : result.edges) {
        json merges = json::array();
        for (const auto& m : e.merges) {
            json idx = json::array();
            for (Vertex v : m.index) idx.push_back(v + 1);
            merges.push_back({{"added", m.added + 1}, {"index", idx}, {"value", m.value}});
        }
        json edge = json::array();
        for (Vertex v : e.vertices) edge.push_back(v + 1);
        diag.push_back({{"edge", edge}, {"merges", merges}});
    }
    j["diagnostics"] = diag;
    return j;
}

// --- datasets -------------------------------------------------------------

inline std::string to_csv(const Dataset& d)
{
    std::ostringstream os;
    char buf[32];
    for (std::size_t i = 0; i < d.p(); ++i) {
        os << d.labels()[i];
        for (double x : d.row(i)) {
            std::snprintf(buf, sizeof buf, "%.17g", x);
            os << ',' << buf;
        }
        os << '\n';
    }
    return os.str();
}

inline Dataset dataset_from_csv(std::istream& in, const std::string& name = "<csv>")
{
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        labels.push_back(cell);
        std::vector<double> row;
        std::size_t col = 1;
        while (std::getline(ss, cell, ',')) {
            ++col;
            try {
                std::size_t used = 0;
                double x = std::stod(cell, &used);
                if (cell.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(x))
                    throw std::invalid_argument(cell);
                row.push_back(x);
            } catch (const std::exception&) {
                throw ValidationError(name + ":" + std::to_string(lineno) + ": column " + std::to_string(col) +
                                      ": not a finite number '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ValidationError(name + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(rows.front().size()) + " values, found " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().empty()) throw ValidationError(name + ": no data");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    return Dataset(std::move(m), std::move(labels));
}

inline constexpr char binary_magic[4] = {'M', 'B', 'D', '1'};

namespace detail {

template <typename T>
void put_le(std::string& out, T value)
{
    static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(const char* src)
{
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, src, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

} // namespace detail

inline std::string to_binary(const Dataset& d)
{
    std::string out(binary_magic, 4);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d.p()));
    detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(d.n()));
    out.reserve(16 + 8 * d.p() * d.n());
    for (double x : d.matrix().values()) detail::put_le<double>(out, x);
    return out;
}

inline Dataset dataset_from_binary(const std::string& bytes, const std::string& name = "<binary>")
{
    if (bytes.size() < 16 || std::memcmp(bytes.data(), binary_magic, 4) != 0)
        throw ValidationError(name + ": not an MBD1 dataset");
    auto p = detail::get_le<std::uint32_t>(bytes.data() + 4);
    auto n = detail::get_le<std::uint64_t>(bytes.data() + 8);
    if (n == 0 || bytes.size() != 16 + 8 * static_cast<std::uint64_t>(p) * n)
        throw ValidationError(name + ": header says " + std::to_string(p) + "x" + std::to_string(n) +
                              " but payload size disagrees");
    Matrix m(p, static_cast<std::size_t>(n));
    const char* src = bytes.data() + 16;
    for (double& x : m.values()) {
        x = detail::get_le<double>(src);
        if (!std::isfinite(x)) throw ValidationError(name + ": non-finite value");
        src += 8;
    }
    return Dataset(std::move(m));
}

inline bool is_binary_path(const std::string& path)
{
    return path.size() >= 4 && (path.ends_with(".bin") || path.ends_with(".mbd"));
}

inline Dataset read_dataset(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    if (is_binary_path(path)) {
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        return dataset_from_binary(bytes, path);
    }
    return dataset_from_csv(in, path);
}

inline void write_dataset(const std::string& path, const Dataset& d)
{
    write_text_file(path, is_binary_path(path) ? to_binary(d) : to_csv(d));
}

} // namespace mbang::io
