#pragma once

// Sample and population cumulant tensors.
//
// A cumulant entry is the signed sum over set partitions of the index
// positions, each block contributing the moment of its variables:
//
//   C_{i1..ik} = sum_{A1..AL} (-1)^(L-1) (L-1)! E[prod_{A1} Z] ... E[prod_{AL} Z]
//
// Sample cumulants plug empirical moments into this sum. Population cumulants
// of a linear mixture Z = T s of independent sources use multilinearity:
//
//   C_{i1..ik} = sum_s kappa_k(s) T_{i1,s} ... T_{ik,s}

#include "errors.hpp"
#include "graph.hpp"
#include "matrix.hpp"
#include "partitions.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mbang {

/// Sorted (non-decreasing) multi-index; the key of every symmetric table.
using MultiIndex = std::vector<Vertex>;

inline MultiIndex sorted_index(std::span<const Vertex> idx)
{
    MultiIndex key(idx.begin(), idx.end());
    std::sort(key.begin(), key.end());
    return key;
}

/// Calls fn(index) for every sorted multi-index of length k over 0..p-1,
/// in lexicographic order.
template <typename Fn>
void for_each_multi_index(int p, int k, Fn&& fn)
{
    if (p <= 0 || k <= 0) return;
    MultiIndex idx(static_cast<std::size_t>(k), 0);
    while (true) {
        fn(std::as_const(idx));
        int i = k - 1;
        while (i >= 0 && idx[i] == p - 1) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[i];
    }
}

/// Symmetric table of moments E[prod_j Z_j], keyed by sorted multi-index.
class MomentTable {
public:
    void set(std::span<const Vertex> idx, double value) { entries_[sorted_index(idx)] = value; }

    std::optional<double> find(std::span<const Vertex> idx) const
    {
        auto it = entries_.find(sorted_index(idx));
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    double at(std::span<const Vertex> idx) const
    {
        if (auto v = find(idx)) return *v;
        std::string s;
        for (Vertex v : idx) s += (s.empty() ? "" : ",") + std::to_string(v + 1);
        throw NumericalError("moment table has no entry for (" + s + ")");
    }

    std::size_t size() const noexcept { return entries_.size(); }
    const std::map<MultiIndex, double>& entries() const noexcept { return entries_; }

private:
    std::map<MultiIndex, double> entries_;
};

/// Empirical mean over samples of prod_l data(idx[l], sample).
inline double sample_moment(const Dataset& data, std::span<const Vertex> idx)
{
    const std::size_t n = data.n();
    if (n == 0) throw UsageError("empty dataset");
    for (Vertex v : idx) detail::check_vertex(v, static_cast<int>(data.p()), "moment index");
    if (idx.empty()) return 1.0;
    std::vector<double> acc(data.row(static_cast<std::size_t>(idx[0])).begin(),
                            data.row(static_cast<std::size_t>(idx[0])).end());
    for (std::size_t l = 1; l < idx.size(); ++l) {
        auto r = data.row(static_cast<std::size_t>(idx[l]));
        for (std::size_t j = 0; j < n; ++j) acc[j] *= r[j];
    }
    double sum = 0.0;
    for (double x : acc) sum += x;
    return sum / static_cast<double>(n);
}

/// Every moment of order 1..k_max.
inline MomentTable sample_moments(const Dataset& data, int k_max)
{
    if (data.n() == 0) throw UsageError("empty dataset");
    if (k_max < 1) throw UsageError("k_max must be at least 1");
    MomentTable table;
    for (int k = 1; k <= k_max; ++k)
        for_each_multi_index(static_cast<int>(data.p()), k,
                             [&](const MultiIndex& idx) { table.set(idx, sample_moment(data, idx)); });
    return table;
}

/// Partition sum for one cumulant entry. `moment` maps a sorted multi-index
/// to E[prod Z]. With skip_singletons, partitions holding a block of size one
/// are dropped, which is exact only for zero-mean variables.
template <typename MomentFn>
    requires std::invocable<MomentFn&, const MultiIndex&>
double cumulant_from_moments(MomentFn&& moment, std::span<const Vertex> idx, bool skip_singletons = false)
{
    const int k = static_cast<int>(idx.size());
    if (k < 1) throw UsageError("cumulant index must be non-empty");
    double total = 0.0;
    MultiIndex block_index;
    for (const auto& partition : set_partitions(k)) {
        if (skip_singletons &&
            std::any_of(partition.begin(), partition.end(), [](const auto& b) { return b.size() == 1; }))
            continue;
        double term = partition_weight(partition.size());
        for (const auto& block : partition) {
            block_index.clear();
            for (int pos : block) block_index.push_back(idx[static_cast<std::size_t>(pos)]);
            std::sort(block_index.begin(), block_index.end());
            term *= moment(std::as_const(block_index));
        }
        total += term;
    }
    return total;
}

inline double cumulant_from_moments(const MomentTable& m, std::span<const Vertex> idx, bool skip_singletons = false)
{
    return cumulant_from_moments([&m](const MultiIndex& key) { return m.at(key); }, idx, skip_singletons);
}

/// Anything that can produce cumulant entries on demand.
class CumulantSource {
public:
    virtual ~CumulantSource() = default;
    virtual int p() const = 0;
    virtual double cumulant(std::span<const Vertex> idx) = 0;
};

/// Plug-in sample cumulants of a dataset, computed lazily and memoized per
/// sorted index. Not thread-safe; use one instance per discovery run.
class SampleCumulants final : public CumulantSource {
public:
    explicit SampleCumulants(Dataset data) : data_(std::move(data))
    {
        if (data_.n() == 0) throw UsageError("empty dataset");
    }

    int p() const override { return static_cast<int>(data_.p()); }

    double cumulant(std::span<const Vertex> idx) override
    {
        if (idx.size() > static_cast<std::size_t>(max_cumulant_order))
            throw NumericalError("cumulant order " + std::to_string(idx.size()) + " exceeds the supported maximum of " +
                                 std::to_string(max_cumulant_order));
        auto key = sorted_index(idx);
        if (auto it = cumulants_.find(key); it != cumulants_.end()) return it->second;
        double value = cumulant_from_moments([this](const MultiIndex& m) { return moment(m); }, key);
        cumulants_.emplace(std::move(key), value);
        return value;
    }

    double moment(const MultiIndex& key)
    {
        if (auto it = moments_.find(key); it != moments_.end()) return it->second;
        double value = sample_moment(data_, key);
        moments_.emplace(key, value);
        return value;
    }

    const Dataset& data() const noexcept { return data_; }

private:
    Dataset data_;
    std::map<MultiIndex, double> moments_;
    std::map<MultiIndex, double> cumulants_;
};

/// Population cumulants of Z = T s for independent sources s with known
/// cumulants. `source_cumulant(s, k)` returns kappa_k of source s.
class MixtureCumulants final : public CumulantSource {
public:
    using SourceCumulantFn = std::function<double(std::size_t source, int order)>;

    MixtureCumulants(Matrix mixing, SourceCumulantFn source_cumulant)
        : mixing_(std::move(mixing)), source_cumulant_(std::move(source_cumulant))
    {
    }

    int p() const override { return static_cast<int>(mixing_.rows()); }

    double cumulant(std::span<const Vertex> idx) override
    {
        const int k = static_cast<int>(idx.size());
        if (k < 1) throw UsageError("cumulant index must be non-empty");
        for (Vertex v : idx) detail::check_vertex(v, p(), "cumulant index");
        double total = 0.0;
        for (std::size_t s = 0; s < mixing_.cols(); ++s) {
            double prod = 1.0;
            for (Vertex v : idx) prod *= mixing_(static_cast<std::size_t>(v), s);
            if (prod != 0.0) total += source_cumulant_(s, k) * prod;
        }
        return total;
    }

    /// Rescale every variable to unit variance (the population analogue of
    /// dividing each data row by its standard deviation).
    void standardize()
    {
        for (std::size_t i = 0; i < mixing_.rows(); ++i) {
            Vertex v = static_cast<Vertex>(i);
            const Vertex pair[2] = {v, v};
            double var = cumulant(pair);
            if (!(var > 0.0)) throw NumericalError("variable " + std::to_string(i + 1) + " has zero variance");
            double scale = 1.0 / std::sqrt(var);
            for (double& x : mixing_.row(i)) x *= scale;
        }
    }

    const Matrix& mixing() const noexcept { return mixing_; }

private:
    Matrix mixing_;
    SourceCumulantFn source_cumulant_;
};

/// Order-k symmetric tensor stored sparsely by sorted multi-index.
class CumulantTensor {
public:
    CumulantTensor() = default;
    CumulantTensor(int order, int p) : order_(order), p_(p)
    {
        if (order < 1 || order > max_cumulant_order)
            throw NumericalError("cumulant order must lie in 1.." + std::to_string(max_cumulant_order));
    }

    /// Materialize every sorted entry of order k from a source.
    static CumulantTensor from_source(CumulantSource& source, int order)
    {
        CumulantTensor t(order, source.p());
        for_each_multi_index(source.p(), order, [&](const MultiIndex& idx) { t.entries_[idx] = source.cumulant(idx); });
        return t;
    }

    int order() const noexcept { return order_; }
    int p() const noexcept { return p_; }

    /// Entry at any permutation of a stored index.
    double at(std::span<const Vertex> idx) const
    {
        if (static_cast<int>(idx.size()) != order_)
            throw UsageError("tensor of order " + std::to_string(order_) + " indexed with " +
                             std::to_string(idx.size()) + " indices");
        auto it = entries_.find(sorted_index(idx));
        if (it == entries_.end()) throw UsageError("cumulant index out of range");
        return it->second;
    }

    void set(std::span<const Vertex> idx, double value) { entries_[sorted_index(idx)] = value; }
    const std::map<MultiIndex, double>& entries() const noexcept { return entries_; }

private:
    int order_ = 0;
    int p_ = 0;
    std::map<MultiIndex, double> entries_;
};

/// Plug-in cumulant tensor of order k from data (rows should be centered).
inline CumulantTensor sample_cumulant_tensor(const Dataset& data, int k)
{
    if (k < 2 || k > max_cumulant_order)
        throw NumericalError("cumulant order must lie in 2.." + std::to_string(max_cumulant_order) + ", got " +
                             std::to_string(k));
    MomentTable moments = sample_moments(data, k);
    CumulantTensor t(k, static_cast<int>(data.p()));
    for_each_multi_index(static_cast<int>(data.p()), k,
                         [&](const MultiIndex& idx) { t.set(idx, cumulant_from_moments(moments, idx)); });
    return t;
}

} // namespace mbang
