#pragma once

#include <vector>

#include "sdmm/matrix.hpp"
#include "sdmm/random.hpp"
#include "sdmm/schemes.hpp"

namespace testing {

using sdmm::ComplexMatrix;
using sdmm::cplx;

/// Triple-loop product, independent of the library's matmul.
inline ComplexMatrix naive_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  sdmm::Dense out = sdmm::Dense::Zero(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(b.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      cplx acc = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
    }
  }
  return ComplexMatrix(out);
}

inline double rel_err(const ComplexMatrix& got, const ComplexMatrix& want) {
  return (got.values() - want.values()).norm() / want.values().norm();
}

/// Inputs drawn as in the experiments: uniform [-1, 1] for real schemes, unit disk otherwise.
inline std::pair<ComplexMatrix, ComplexMatrix> random_inputs(sdmm::SchemeId id, std::size_t t, std::size_t s,
                                                            std::size_t r, std::uint64_t seed) {
  sdmm::RandomSource rng(seed);
  if (sdmm::is_real_scheme(id)) return {rng.uniform_real_matrix(t, s), rng.uniform_real_matrix(s, r)};
  return {rng.unit_disk_matrix(t, s), rng.unit_disk_matrix(s, r)};
}

inline std::vector<sdmm::WorkerResponse> compute_all(const sdmm::EncodedShares& shares,
                                                     sdmm::ComputeOptions options = {}) {
  std::vector<sdmm::WorkerResponse> out;
  for (const auto& s : shares.shares) out.push_back(sdmm::worker_compute(shares.scheme, s, options));
  return out;
}

inline ComplexMatrix run_scheme(const sdmm::SchemeParams& p, const ComplexMatrix& a, const ComplexMatrix& b,
                                sdmm::DecodeOptions options = {}) {
  const auto shares = sdmm::encode(p, a, b);
  const auto responses = compute_all(shares);
  return sdmm::decode(p, responses, options).product;
}

/// Parameters with the partition counts applied to whichever family the scheme belongs to.
inline sdmm::SchemeParams make_params(sdmm::SchemeId id, std::size_t parts, std::size_t x) {
  sdmm::SchemeParams p;
  p.scheme = id;
  p.m = parts;
  p.k = parts;
  p.l = parts;
  p.x = x;
  return p;
}

}  // namespace testing
