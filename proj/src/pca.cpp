#include "knnmt/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "knnmt/io_util.hpp"

namespace knnmt {

namespace {

constexpr char kMagic[] = "KNNPC1";
constexpr double kPowerTolerance = 1e-10;
constexpr std::size_t kMaxPowerIters = 1000;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

// Removes from v its components along previously extracted columns.
void orthogonalize(std::vector<double>& v, const std::vector<std::vector<double>>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& u : basis) {
      const double c = dot(v, u);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * u[i];
    }
  }
}

// Deterministic fallback direction orthogonal to the found basis, used when
// the residual spectrum is numerically zero.
std::vector<double> canonical_completion(std::size_t dim,
                                         const std::vector<std::vector<double>>& basis) {
  for (std::size_t axis = 0; axis < dim; ++axis) {
    std::vector<double> v(dim, 0.0);
    v[axis] = 1.0;
    orthogonalize(v, basis);
    const double n = norm(v);
    if (n > 1e-6) {
      for (double& x : v) x /= n;
      return v;
    }
  }
  throw Error("fit_pca: failed to complete orthonormal basis");
}

void matvec(const std::vector<double>& cov, std::size_t dim, const std::vector<double>& v,
            std::vector<double>& out) {
  for (std::size_t r = 0; r < dim; ++r) {
    const double* row = cov.data() + r * dim;
    double s = 0.0;
    for (std::size_t c = 0; c < dim; ++c) s += row[c] * v[c];
    out[r] = s;
  }
}

}  // namespace

PcaModel fit_pca(const Datastore& ds, std::size_t d) {
  const std::size_t dim = ds.dim;
  const std::size_t n = ds.size();
  if (d == 0) throw Error("fit_pca: output dim must be >= 1");
  if (d > dim) {
    throw Error("fit_pca: output dim " + std::to_string(d) + " exceeds input dim " +
                std::to_string(dim));
  }
  if (n < 2) throw Error("fit_pca: need at least 2 entries");

  std::vector<double> mean(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const float* key = ds.keys.data() + i * dim;
    for (std::size_t j = 0; j < dim; ++j) mean[j] += key[j];
  }
  for (double& m : mean) m /= static_cast<double>(n);

  // Sample covariance of the centered keys.
  std::vector<double> cov(dim * dim, 0.0);
  std::vector<double> centered(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const float* key = ds.keys.data() + i * dim;
    for (std::size_t j = 0; j < dim; ++j) centered[j] = key[j] - mean[j];
    for (std::size_t r = 0; r < dim; ++r) {
      const double cr = centered[r];
      double* row = cov.data() + r * dim;
      for (std::size_t c = r; c < dim; ++c) row[c] += cr * centered[c];
    }
  }
  const double scale = 1.0 / static_cast<double>(n - 1);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = r; c < dim; ++c) {
      cov[r * dim + c] *= scale;
      cov[c * dim + r] = cov[r * dim + c];
    }
  }

  std::vector<std::vector<double>> basis;
  std::vector<double> eigenvalues;
  std::mt19937_64 rng(0x9c0ffee1u);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (std::size_t comp = 0; comp < d; ++comp) {
    std::vector<double> v(dim);
    for (double& x : v) x = gauss(rng);
    orthogonalize(v, basis);
    double vn = norm(v);
    if (vn < 1e-12) {
      v = canonical_completion(dim, basis);
    } else {
      for (double& x : v) x /= vn;
    }

    std::vector<double> next(dim);
    bool degenerate = false;
    for (std::size_t iter = 0; iter < kMaxPowerIters; ++iter) {
      matvec(cov, dim, v, next);
      orthogonalize(next, basis);
      const double nn = norm(next);
      if (nn < 1e-30) {
        degenerate = true;
        break;
      }
      for (double& x : next) x /= nn;
      if (dot(next, v) < 0.0) {
        for (double& x : next) x = -x;
      }
      double delta = 0.0;
      for (std::size_t i = 0; i < dim; ++i) delta += (next[i] - v[i]) * (next[i] - v[i]);
      v.swap(next);
      if (std::sqrt(delta) < kPowerTolerance) break;
    }

    if (degenerate) {
      v = canonical_completion(dim, basis);
      eigenvalues.push_back(0.0);
    } else {
      matvec(cov, dim, v, next);
      eigenvalues.push_back(std::max(0.0, dot(v, next)));
    }
    basis.push_back(std::move(v));
  }

  // Near-equal eigenvalues can come out marginally out of order.
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return eigenvalues[a] > eigenvalues[b]; });

  PcaModel model;
  model.input_dim = static_cast<std::uint32_t>(dim);
  model.output_dim = static_cast<std::uint32_t>(d);
  model.mean.assign(mean.begin(), mean.end());
  model.projection.resize(dim * d);
  model.explained_variance.resize(d);
  for (std::size_t c = 0; c < d; ++c) {
    std::vector<double>& col = basis[order[c]];
    // Sign normalization: largest-magnitude component positive.
    std::size_t arg = 0;
    for (std::size_t i = 1; i < dim; ++i) {
      if (std::abs(col[i]) > std::abs(col[arg])) arg = i;
    }
    if (col[arg] < 0.0) {
      for (double& x : col) x = -x;
    }
    for (std::size_t r = 0; r < dim; ++r) {
      model.projection[r * d + c] = static_cast<float>(col[r]);
    }
    model.explained_variance[c] = static_cast<float>(eigenvalues[order[c]]);
  }
  return model;
}

void apply_pca(const PcaModel& pca, std::span<const float> in, std::span<float> out) {
  if (in.size() != pca.input_dim) {
    throw Error("apply_pca: vector dim " + std::to_string(in.size()) +
                " does not match model input dim " + std::to_string(pca.input_dim));
  }
  if (out.size() != pca.output_dim) throw Error("apply_pca: bad output span size");
  const std::size_t d = pca.output_dim;
  std::fill(out.begin(), out.end(), 0.0f);
  for (std::size_t r = 0; r < pca.input_dim; ++r) {
    const float x = in[r] - pca.mean[r];
    const float* row = pca.projection.data() + r * d;
    for (std::size_t c = 0; c < d; ++c) out[c] += x * row[c];
  }
}

std::vector<float> apply_pca(const PcaModel& pca, std::span<const float> in) {
  std::vector<float> out(pca.output_dim);
  apply_pca(pca, in, out);
  return out;
}

Datastore apply_pca(const PcaModel& pca, const Datastore& ds) {
  if (ds.dim != pca.input_dim) {
    throw Error("apply_pca: datastore dim " + std::to_string(ds.dim) +
                " does not match model input dim " + std::to_string(pca.input_dim));
  }
  Datastore out;
  out.dim = pca.output_dim;
  out.values = ds.values;
  out.keys.resize(ds.size() * static_cast<std::size_t>(pca.output_dim));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    apply_pca(pca, ds.key(i), {out.keys.data() + i * pca.output_dim, pca.output_dim});
  }
  return out;
}

std::vector<float> pca_reconstruct(const PcaModel& pca, std::span<const float> reduced) {
  if (reduced.size() != pca.output_dim) throw Error("pca_reconstruct: dim mismatch");
  std::vector<float> out(pca.input_dim);
  const std::size_t d = pca.output_dim;
  for (std::size_t r = 0; r < pca.input_dim; ++r) {
    const float* row = pca.projection.data() + r * d;
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) s += static_cast<double>(row[c]) * reduced[c];
    out[r] = static_cast<float>(s + pca.mean[r]);
  }
  return out;
}

void save_pca(const PcaModel& pca, const std::filesystem::path& path) {
  auto out = io::open_output(path);
  io::write_bytes(out, kMagic, 6);
  io::write_u32(out, pca.input_dim);
  io::write_u32(out, pca.output_dim);
  io::write_f32_array(out, pca.mean.data(), pca.mean.size());
  io::write_f32_array(out, pca.projection.data(), pca.projection.size());
  io::write_f32_array(out, pca.explained_variance.data(), pca.explained_variance.size());
}

PcaModel load_pca(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  io::expect_magic(in, kMagic, "pca model");
  PcaModel pca;
  pca.input_dim = io::read_u32(in, "input_dim");
  pca.output_dim = io::read_u32(in, "output_dim");
  if (pca.input_dim == 0 || pca.output_dim == 0 || pca.output_dim > pca.input_dim) {
    throw IoError(IoError::Kind::BadHeader, "pca model header: invalid dims");
  }
  pca.mean.resize(pca.input_dim);
  pca.projection.resize(static_cast<std::size_t>(pca.input_dim) * pca.output_dim);
  pca.explained_variance.resize(pca.output_dim);
  io::read_bytes(in, pca.mean.data(), pca.mean.size() * sizeof(float), "mean");
  io::read_bytes(in, pca.projection.data(), pca.projection.size() * sizeof(float),
                 "projection");
  io::read_bytes(in, pca.explained_variance.data(),
                 pca.explained_variance.size() * sizeof(float), "explained variance");
  return pca;
}

}  // namespace knnmt
