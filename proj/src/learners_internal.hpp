#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tradebench/learners.hpp"

namespace tradebench::detail {

Tree build_tree(std::span<const SparseVector> X, std::span<const std::uint32_t> y, std::size_t num_classes,
                const Hyperparams& h);
ForestParams build_forest(std::span<const SparseVector> X, std::span<const std::uint32_t> y,
                          std::size_t num_classes, const Hyperparams& h);

}  // namespace tradebench::detail
