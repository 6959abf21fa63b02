#pragma once

#include "pmd/core.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace pmd {

// Dense operator over a tensor-product index, already scaled by the
// quadrature weights. dims lists the factor sizes, slowest-varying first.
class WeightedOperator {
 public:
  WeightedOperator(Eigen::MatrixXcd matrix, std::vector<std::size_t> dims);

  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  Eigen::Index size() const { return matrix_.rows(); }
  double trace() const { return matrix_.trace().real(); }
  double hermiticity_error() const;

 private:
  Eigen::MatrixXcd matrix_;
  std::vector<std::size_t> dims_;
};

enum class Subsystem { A, B };

std::size_t composite_index(const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& digits);

// Transposes the listed factors between row and column index.
WeightedOperator partial_transpose(const WeightedOperator& op,
                                   const std::vector<std::size_t>& factors);
// Two-factor operators: A is factor 0, B is factor 1.
WeightedOperator partial_transpose(const WeightedOperator& op, Subsystem which);

// Partial trace over every factor not listed in keep.
WeightedOperator reduce(const WeightedOperator& op,
                        const std::vector<std::size_t>& keep);

struct NegativityOptions {
  double cutoff = 1e-10;
  bool trace_norm_check = false;
};

struct NegativityReport {
  double negativity = 0.0;
  // (||X||_1 - Tr X)/2 from singular values; NaN unless requested.
  double trace_norm_negativity = std::numeric_limits<double>::quiet_NaN();
  double min_eigenvalue = 0.0;
  double cutoff = 0.0;
};

// Sum of |negative eigenvalues| of op itself (op is the transposed operator).
NegativityReport negativity(const WeightedOperator& op,
                            const NegativityOptions& options = {});
// Negativity of rho across the cut that transposes the listed factors.
NegativityReport bipartite_negativity(const WeightedOperator& rho,
                                      const std::vector<std::size_t>& factors,
                                      const NegativityOptions& options = {});

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m);

struct PptSubmatrix {
  Eigen::Matrix2cd matrix;
  bool negative = false;
  // |m01|^2 - m00 m11; positive iff the submatrix has a negative eigenvalue.
  double margin = 0.0;
};

// Principal 2x2 submatrix of the partial transpose of op (listed factors
// transposed) at composite indices r1, r2 of the transposed operator.
PptSubmatrix ppt_submatrix(const WeightedOperator& op,
                           const std::vector<std::size_t>& factors,
                           std::size_t r1, std::size_t r2);

// Operators built from densities. Single photon: dims {2, n}.
WeightedOperator to_operator(const SinglePhotonDensity& rho);
// Two photons, full composite: dims {2, 2, n, n}. Small grids only.
WeightedOperator to_operator(const TwoPhotonDensity& rho);

// Partial traces that avoid the full composite operator.
WeightedOperator polarization_reduction(const SinglePhotonDensity& rho);
WeightedOperator frequency_reduction(const SinglePhotonDensity& rho);
WeightedOperator polarization_reduction(const TwoPhotonDensity& rho);
WeightedOperator frequency_reduction(const TwoPhotonDensity& rho);

double purity(const WeightedOperator& op);

}  // namespace pmd
