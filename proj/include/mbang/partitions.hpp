#pragma once

// Set partitions of {0, ..., k-1}, generated from restricted-growth strings.

#include "errors.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace mbang {

inline constexpr int max_cumulant_order = 8;

/// A partition as a list of blocks; each block lists positions in increasing order.
using SetPartition = std::vector<std::vector<int>>;

namespace detail {

inline std::vector<SetPartition> generate_partitions(int k)
{
    std::vector<SetPartition> out;
    if (k == 0) {
        out.emplace_back();
        return out;
    }
    // a[i] is the block of element i; a[0] = 0 and a[i] <= 1 + max(a[0..i-1]).
    std::vector<int> a(static_cast<std::size_t>(k), 0);
    std::vector<int> prefix_max(static_cast<std::size_t>(k), 0);
    while (true) {
        SetPartition blocks(static_cast<std::size_t>(prefix_max[k - 1] + 1));
        for (int i = 0; i < k; ++i) blocks[a[i]].push_back(i);
        out.push_back(std::move(blocks));

        int i = k - 1;
        while (i > 0 && a[i] == prefix_max[i - 1] + 1) --i;
        if (i == 0) break;
        ++a[i];
        prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
        for (int j = i + 1; j < k; ++j) {
            a[j] = 0;
            prefix_max[j] = prefix_max[i];
        }
    }
    return out;
}

} // namespace detail

/// All set partitions of a k-element set, 0 <= k <= 8. Built once per process.
inline const std::vector<SetPartition>& set_partitions(int k)
{
    if (k < 0 || k > max_cumulant_order)
        throw NumericalError("set partitions supported for orders 0.." + std::to_string(max_cumulant_order) +
                             ", got " + std::to_string(k));
    static const auto table = [] {
        std::array<std::vector<SetPartition>, max_cumulant_order + 1> t;
        for (int i = 0; i <= max_cumulant_order; ++i) t[static_cast<std::size_t>(i)] = detail::generate_partitions(i);
        return t;
    }();
    return table[static_cast<std::size_t>(k)];
}

/// (-1)^(L-1) (L-1)! for a partition with L blocks.
inline double partition_weight(std::size_t blocks)
{
    double w = 1.0;
    for (std::size_t i = 2; i < blocks; ++i) w *= static_cast<double>(i);
    return (blocks % 2 == 1) ? w : -w;
}

} // namespace mbang
