#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "knnmt/datastore.hpp"

namespace knnmt {

/// Mean vector plus an orthonormal projection onto the top-d principal
/// components of the training keys.
struct PcaModel {
  std::uint32_t input_dim = 0;
  std::uint32_t output_dim = 0;
  std::vector<float> mean;                // input_dim
  std::vector<float> projection;          // input_dim x output_dim, row-major
  std::vector<float> explained_variance;  // output_dim, non-increasing
};

/// Fits PCA on the datastore keys: mean-centers, then extracts the top-d
/// eigenvectors of the sample covariance with deflated power iteration
/// (tolerance 1e-10, at most 1000 iterations per component). Columns are
/// sign-normalized so the largest-magnitude component is positive.
PcaModel fit_pca(const Datastore& ds, std::size_t d);

/// y = projection^T (x - mean)
void apply_pca(const PcaModel& pca, std::span<const float> in, std::span<float> out);
std::vector<float> apply_pca(const PcaModel& pca, std::span<const float> in);

/// Reduces every key; values are unchanged.
Datastore apply_pca(const PcaModel& pca, const Datastore& ds);

/// x_hat = projection y + mean (exact inverse when output_dim == input_dim).
std::vector<float> pca_reconstruct(const PcaModel& pca, std::span<const float> reduced);

void save_pca(const PcaModel& pca, const std::filesystem::path& path);
PcaModel load_pca(const std::filesystem::path& path);

}  // namespace knnmt
