#include "sdmm/vandermonde.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "sdmm/error.hpp"

namespace sdmm {

GeneralizedVandermonde::GeneralizedVandermonde(std::int64_t n, std::vector<std::int64_t> eval_indices,
                                               std::vector<std::int64_t> exponents)
    : n_(n), eval_indices_(std::move(eval_indices)), exponents_(std::move(exponents)) {
  require(n_ >= 1, Errc::invalid_parameter, "root order must be positive");
  require(!eval_indices_.empty() && !exponents_.empty(), Errc::invalid_parameter,
          "generalized Vandermonde needs at least one point and one exponent");
  std::set<std::int64_t> seen;
  for (const auto k : eval_indices_) {
    require(k >= 0 && k < n_, Errc::invalid_parameter, "evaluation index " + std::to_string(k) + " outside [0, n)");
    require(seen.insert(k).second, Errc::invalid_parameter, "evaluation points must be distinct");
  }
  require(std::set<std::int64_t>(exponents_.begin(), exponents_.end()).size() == exponents_.size(),
          Errc::invalid_parameter, "exponents must be distinct");

  Dense v(static_cast<Eigen::Index>(exponents_.size()), static_cast<Eigen::Index>(eval_indices_.size()));
  for (std::size_t j = 0; j < exponents_.size(); ++j) {
    for (std::size_t i = 0; i < eval_indices_.size(); ++i) {
      v(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = RootPoint{n_, eval_indices_[i]}.pow(exponents_[j]);
    }
  }
  matrix_ = ComplexMatrix(std::move(v));
}

GeneralizedVandermonde GeneralizedVandermonde::standard(std::int64_t n, std::vector<std::int64_t> eval_indices) {
  std::vector<std::int64_t> exps(eval_indices.size());
  std::iota(exps.begin(), exps.end(), 0);
  return GeneralizedVandermonde(n, std::move(eval_indices), std::move(exps));
}

GeneralizedVandermonde GeneralizedVandermonde::columns(std::span<const std::size_t> positions) const {
  std::vector<std::int64_t> idx;
  idx.reserve(positions.size());
  for (const auto p : positions) {
    require(p < eval_indices_.size(), Errc::invalid_parameter, "column position out of range");
    idx.push_back(eval_indices_[p]);
  }
  return GeneralizedVandermonde(n_, std::move(idx), exponents_);
}

std::vector<std::int64_t> GeneralizedVandermonde::complement_indices() const {
  std::vector<std::int64_t> out;
  for (std::int64_t k = 0; k < n_; ++k) {
    if (std::find(eval_indices_.begin(), eval_indices_.end(), k) == eval_indices_.end()) out.push_back(k);
  }
  return out;
}

bool GeneralizedVandermonde::consecutive_exponents() const {
  auto sorted = exponents_;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t j = 1; j < sorted.size(); ++j) {
    if (sorted[j] != sorted[j - 1] + 1) return false;
  }
  return true;
}

}  // namespace sdmm
