#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdmm/laurent.hpp"
#include "sdmm/matrix.hpp"
#include "sdmm/sharing.hpp"

namespace sdmm {

/// Wire ids are the enumerator values.
enum class SchemeId : std::uint8_t {
  cmatdot = 1,
  cdft = 2,
  cgasp = 3,
  ca3s = 4,
  rmatdot = 5,
  rdft = 6,
  rgasp = 7,
  ra3s = 8,
};

const char* to_string(SchemeId id) noexcept;
/// Case-insensitive scheme name ("cmatdot", "RGASP", ...).
SchemeId parse_scheme(const std::string& name);
const std::array<SchemeId, 8>& all_schemes() noexcept;

bool is_real_scheme(SchemeId id) noexcept;
bool is_dft_scheme(SchemeId id) noexcept;
bool is_inner_scheme(SchemeId id) noexcept;

struct SchemeParams {
  SchemeId scheme = SchemeId::cmatdot;
  /// Inner partition count M.
  std::size_t m = 1;
  /// Outer partition counts K (rows of A) and L (columns of B).
  std::size_t k = 1;
  std::size_t l = 1;
  std::size_t x = 0;
  /// 0 selects R + S (or the exact count for DFT schemes).
  std::size_t n_workers = 0;
  std::size_t stragglers = 0;
  double delta = 1e-2;
  /// Replaces the calibrated variance on both sides when set.
  std::optional<double> sigma2;
  Precision precision = Precision::f64;
  std::uint64_t seed = 0;
};

/// Minimum number of responses for decoding. `p1` is M for inner schemes and
/// K for outer ones; `l` is ignored by inner schemes.
std::size_t recovery_threshold(SchemeId id, std::size_t p1, std::size_t l, std::size_t x);
std::size_t recovery_threshold(const SchemeParams& params);

/// Checks the parameters and fills in n_workers. Throws invalid-parameter
/// naming the violated constraint.
SchemeParams resolve(SchemeParams params);

/// Divisibility and realness requirements for A (t x s) and B (s x r).
void check_inputs(const SchemeParams& params, const ComplexMatrix& a, const ComplexMatrix& b);

/// Calibrated (or overridden) noise for the A and B sides.
struct SideNoise {
  NoiseSpec a;
  NoiseSpec b;
};
SideNoise noise_levels(const SchemeParams& params);

// ---------------------------------------------------------------------------
// Exponent layouts

enum class Coefficient { data, noise };

/// Coefficient `index` (0-based) of the given kind sits at z^exponent.
struct LayoutTerm {
  Coefficient kind;
  std::size_t index;
  std::int64_t exponent;
};

struct Window {
  std::int64_t min_exp = 0;
  std::size_t num_terms = 0;

  std::int64_t max_exp() const noexcept { return min_exp + static_cast<std::int64_t>(num_terms) - 1; }
  bool contains(std::int64_t e) const noexcept { return e >= min_exp && e <= max_exp(); }
};

/// Block (row_block, col_block) of the product is the coefficient of z^exponent
/// in h (or in h^- when `minus`). Inner schemes have a single entry.
struct Extraction {
  std::size_t row_block;
  std::size_t col_block;
  std::int64_t exponent;
  bool minus;
};

struct SchemeLayout {
  std::vector<LayoutTerm> f;
  std::vector<LayoutTerm> g;
  /// Interpolation window of h (h^+ for real outer schemes).
  Window plus;
  /// Window of h^- (real outer schemes only).
  std::optional<Window> minus;
  std::vector<Extraction> extract;
};

SchemeLayout scheme_layout(const SchemeParams& params);

// ---------------------------------------------------------------------------
// Partitioning and complexification

struct Partition {
  std::vector<ComplexMatrix> a;
  std::vector<ComplexMatrix> b;
};

/// Column blocks of A and row blocks of B, so AB = sum_j A_j B_j.
Partition inner_partition(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t m_parts);
/// Row blocks of A and column blocks of B, so AB is the K x L grid of A_j B_j'.
Partition outer_partition(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t k_parts, std::size_t l_parts);

/// A' = A1 + iA2 (column halves), B' = B1 - iB2 (row halves); AB = Re(A'B').
std::pair<ComplexMatrix, ComplexMatrix> inner_complexify(const ComplexMatrix& a, const ComplexMatrix& b);
/// A' = A1 + iA2 (row halves), B' = B1 + iB2 (column halves).
std::pair<ComplexMatrix, ComplexMatrix> outer_complexify(const ComplexMatrix& a, const ComplexMatrix& b);
/// Real AB from P+ = A'B' and P- = A' conj(B').
ComplexMatrix assemble_outer(const ComplexMatrix& p_plus, const ComplexMatrix& p_minus);
/// Row-major K x L grid of equally sized blocks.
ComplexMatrix assemble_blocks(std::span<const ComplexMatrix> blocks, std::size_t k_parts, std::size_t l_parts);

// ---------------------------------------------------------------------------
// Encoding

struct WorkerShare {
  /// 1-based; the share is evaluated at alpha_worker = omega_N^worker.
  std::size_t worker;
  ComplexMatrix a;
  ComplexMatrix b;
};

struct EncodedShares {
  SchemeId scheme;
  std::size_t n_workers;
  std::vector<WorkerShare> shares;
};

struct EncodingPolynomials {
  LaurentMatrixPoly f;
  LaurentMatrixPoly g;
};

/// The scheme's f and g with the random coefficients drawn from the params seed.
EncodingPolynomials encoding_polynomials(const SchemeParams& params, const ComplexMatrix& a, const ComplexMatrix& b);

/// One share pair per worker, computed as linear combinations of the
/// coefficient matrices with the generator-matrix entries as weights.
EncodedShares encode(const SchemeParams& params, const ComplexMatrix& a, const ComplexMatrix& b);

/// The nested coset codes that the encoding applies to A and B.
struct GeneratorPair {
  NestedCosetScheme a;
  NestedCosetScheme b;
};
/// Requires X >= 1.
GeneratorPair generator_pair(const SchemeParams& params);

/// Worst-case leakage of both sides at the params' noise level.
struct SchemeAudit {
  LeakageReport a;
  LeakageReport b;
  double worst_case_nats = 0.0;
  bool passed = true;
};
SchemeAudit audit_scheme(const SchemeParams& params, AuditOptions options = {});

// ---------------------------------------------------------------------------
// Worker computation

struct WorkerResponse {
  std::size_t worker = 0;
  /// h(alpha) for complex schemes, Re h(alpha) for real inner schemes, h^+(alpha) otherwise.
  ComplexMatrix plus;
  /// h^-(alpha) for real outer schemes.
  std::optional<ComplexMatrix> minus;
};

enum class WorkerPath {
  /// Complex products as written.
  direct,
  /// One real product of stacked real and imaginary parts.
  real_block,
};

struct ComputeOptions {
  MatmulMethod method = MatmulMethod::naive;
  WorkerPath path = WorkerPath::direct;
};

WorkerResponse worker_compute(SchemeId id, std::size_t worker, const ComplexMatrix& a_share,
                              const ComplexMatrix& b_share, ComputeOptions options = {});
WorkerResponse worker_compute(SchemeId id, const WorkerShare& share, ComputeOptions options = {});

// ---------------------------------------------------------------------------
// Decoding

enum class ResiduePolicy {
  /// Throw numerical-failure when the imaginary residue of a real scheme exceeds the tolerance.
  fail,
  /// Record the residue and discard it.
  report,
};

enum class DftDecode { average, interpolate };

struct DecodeOptions {
  ResiduePolicy residue = ResiduePolicy::fail;
  double residue_tolerance = 1e-6;
  DftDecode dft = DftDecode::average;
  /// Least-squares over every response instead of the first R.
  bool use_all_responses = false;
};

struct DecodeResult {
  ComplexMatrix product;
  /// ||Im||_F / ||result||_F of the extracted coefficient before discarding it (real schemes).
  double imag_residue = 0.0;
  std::vector<std::size_t> used_workers;
};

DecodeResult decode(const SchemeParams& params, std::span<const WorkerResponse> responses,
                    DecodeOptions options = {});

// ---------------------------------------------------------------------------
// Operation counts

enum class CostRow {
  real_linear_inner,
  complexified_inner,
  complex_embedding_inner,
  real_linear_outer,
  complexified_outer,
  complex_embedding_outer,
};

struct Dims {
  std::uint64_t t;
  std::uint64_t s;
  std::uint64_t r;
};

struct CostCounts {
  std::uint64_t encode_a;
  std::uint64_t encode_b;
  std::uint64_t decode;
};

/// Real additions and multiplications spent on encoding A (t x s), B (s x r)
/// and decoding. `p1` is M or K. `l` is used by the complexified and embedding
/// outer rows; the real linear outer row counts B in K blocks, as tabulated.
CostCounts cost_model(CostRow row, Dims dims, std::uint64_t p1, std::uint64_t l, std::uint64_t x,
                      std::uint64_t r_threshold);

}  // namespace sdmm
