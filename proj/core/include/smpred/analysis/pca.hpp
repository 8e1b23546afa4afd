#pragma once

#include "smpred/nn/tensor.hpp"

namespace smpred::analysis {

/// Top-2 principal axes of a code set.
struct PcaModel {
    nn::Vector mean;                 // D
    nn::Matrix components;           // 2 x D, rows orthonormal
    nn::Vector explained_variance;   // 2, descending
};

/// Eigendecomposition of the sample covariance (divisor N-1) of mean-
/// centered codes (N x D, N > D). Component sign is fixed so each row's
/// largest-magnitude entry is positive. Throws on degenerate input where
/// all rows are identical.
PcaModel pca_fit(const nn::Matrix& codes);

/// Centered codes projected onto the components: N x 2.
nn::Matrix pca_project(const PcaModel& model, const nn::Matrix& codes);

}  // namespace smpred::analysis
