#include "pmd/entanglement.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numeric>

namespace pmd {

namespace {

std::size_t product(const std::vector<std::size_t>& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         std::multiplies<>());
}

std::vector<std::size_t> digits_of(std::size_t index,
                                   const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> d(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    d[k] = index % dims[k];
    index /= dims[k];
  }
  return d;
}

void check_factors(const std::vector<std::size_t>& dims,
                   const std::vector<std::size_t>& factors) {
  std::vector<bool> seen(dims.size(), false);
  for (std::size_t f : factors) {
    if (f >= dims.size() || seen[f])
      throw Error(ErrorCode::invalid_argument,
                  "factor list inconsistent with operator structure");
    seen[f] = true;
  }
}

std::vector<std::size_t> strides_of(const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
  return s;
}

}  // namespace

WeightedOperator::WeightedOperator(Eigen::MatrixXcd matrix,
                                   std::vector<std::size_t> dims)
    : matrix_(std::move(matrix)), dims_(std::move(dims)) {
  const auto n = Eigen::Index(product(dims_));
  if (dims_.empty() || matrix_.rows() != n || matrix_.cols() != n)
    throw Error(ErrorCode::invalid_argument,
                "structure descriptor inconsistent with matrix dimension");
}

double WeightedOperator::hermiticity_error() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

std::size_t composite_index(const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& digits) {
  if (digits.size() != dims.size())
    throw Error(ErrorCode::invalid_argument, "index arity mismatch");
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (digits[k] >= dims[k])
      throw Error(ErrorCode::invalid_argument, "index out of range");
    idx = idx * dims[k] + digits[k];
  }
  return idx;
}

WeightedOperator partial_transpose(const WeightedOperator& op,
                                   const std::vector<std::size_t>& factors) {
  const auto& dims = op.dims();
  check_factors(dims, factors);
  const std::vector<std::size_t> stride = strides_of(dims);
  const auto n = op.size();
  std::vector<std::size_t> part(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto d = digits_of(std::size_t(r), dims);
    std::size_t p = 0;
    for (std::size_t f : factors) p += d[f] * stride[f];
    part[std::size_t(r)] = p;
  }
  const Eigen::MatrixXcd& m = op.matrix();
  Eigen::MatrixXcd out(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const std::size_t pc = part[std::size_t(c)];
    for (Eigen::Index r = 0; r < n; ++r) {
      const std::size_t pr = part[std::size_t(r)];
      out(r, c) = m(Eigen::Index(std::size_t(r) - pr + pc),
                    Eigen::Index(std::size_t(c) - pc + pr));
    }
  }
  return WeightedOperator(std::move(out), dims);
}

WeightedOperator partial_transpose(const WeightedOperator& op, Subsystem which) {
  if (op.dims().size() != 2)
    throw Error(ErrorCode::invalid_argument,
                "subsystem transpose needs a two-factor operator");
  return partial_transpose(op, {which == Subsystem::A ? 0u : 1u});
}

WeightedOperator reduce(const WeightedOperator& op,
                        const std::vector<std::size_t>& keep) {
  const auto& dims = op.dims();
  check_factors(dims, keep);
  std::vector<bool> kept(dims.size(), false);
  for (std::size_t f : keep) kept[f] = true;
  std::vector<std::size_t> kdims, tfactors;
  for (std::size_t f : keep) kdims.push_back(dims[f]);
  for (std::size_t f = 0; f < dims.size(); ++f)
    if (!kept[f]) tfactors.push_back(f);
  std::vector<std::size_t> tdims;
  for (std::size_t f : tfactors) tdims.push_back(dims[f]);

  const std::vector<std::size_t> stride = strides_of(dims);
  const std::size_t nk = product(kdims), nt = product(tdims);
  std::vector<std::size_t> koff(nk), toff(nt);
  for (std::size_t i = 0; i < nk; ++i) {
    const auto d = digits_of(i, kdims);
    std::size_t o = 0;
    for (std::size_t k = 0; k < keep.size(); ++k) o += d[k] * stride[keep[k]];
    koff[i] = o;
  }
  for (std::size_t i = 0; i < nt; ++i) {
    const auto d = digits_of(i, tdims);
    std::size_t o = 0;
    for (std::size_t k = 0; k < tfactors.size(); ++k)
      o += d[k] * stride[tfactors[k]];
    toff[i] = o;
  }
  const Eigen::MatrixXcd& m = op.matrix();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(Eigen::Index(nk), Eigen::Index(nk));
  for (std::size_t c = 0; c < nk; ++c)
    for (std::size_t r = 0; r < nk; ++r) {
      cplx s = 0.0;
      for (std::size_t t = 0; t < nt; ++t)
        s += m(Eigen::Index(koff[r] + toff[t]), Eigen::Index(koff[c] + toff[t]));
      out(Eigen::Index(r), Eigen::Index(c)) = s;
    }
  return WeightedOperator(std::move(out), kdims);
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
  if (m.imag().cwiseAbs().maxCoeff() == 0.0) {
    const Eigen::MatrixXd re = m.real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(re, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw Error(ErrorCode::numeric, "eigensolver did not converge");
    return es.eigenvalues();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::numeric, "eigensolver did not converge");
  return es.eigenvalues();
}

NegativityReport negativity(const WeightedOperator& op,
                            const NegativityOptions& options) {
  const Eigen::MatrixXcd& m = op.matrix();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (op.hermiticity_error() > 1e-10 * scale)
    throw Error(ErrorCode::invalid_argument, "operator is not Hermitian");
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());

  NegativityReport r;
  r.cutoff = options.cutoff;
  const Eigen::VectorXd ev = hermitian_eigenvalues(h);
  r.min_eigenvalue = ev.minCoeff();
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) <= -options.cutoff) r.negativity -= ev(i);
  if (options.trace_norm_check) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(h);
    r.trace_norm_negativity =
        0.5 * (svd.singularValues().sum() - h.trace().real());
  }
  return r;
}

NegativityReport bipartite_negativity(const WeightedOperator& rho,
                                      const std::vector<std::size_t>& factors,
                                      const NegativityOptions& options) {
  return negativity(partial_transpose(rho, factors), options);
}

PptSubmatrix ppt_submatrix(const WeightedOperator& op,
                           const std::vector<std::size_t>& factors,
                           std::size_t r1, std::size_t r2) {
  const auto& dims = op.dims();
  check_factors(dims, factors);
  const auto n = std::size_t(op.size());
  if (r1 >= n || r2 >= n)
    throw Error(ErrorCode::invalid_argument, "submatrix index out of range");
  const auto d1 = digits_of(r1, dims), d2 = digits_of(r2, dims);
  const std::vector<std::size_t>* dig[2] = {&d1, &d2};
  PptSubmatrix s;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      auto row = *dig[i], col = *dig[j];
      for (std::size_t f : factors) std::swap(row[f], col[f]);
      s.matrix(i, j) = op.matrix()(Eigen::Index(composite_index(dims, row)),
                                   Eigen::Index(composite_index(dims, col)));
    }
  const double diag = s.matrix(0, 0).real() * s.matrix(1, 1).real();
  const double off = std::abs(s.matrix(0, 1) * s.matrix(1, 0));
  s.margin = off - diag;
  s.negative = off > diag;
  return s;
}

WeightedOperator to_operator(const SinglePhotonDensity& rho) {
  return WeightedOperator(rho.weighted(), {2, rho.nodes()});
}

WeightedOperator to_operator(const TwoPhotonDensity& rho) {
  const std::size_t n = rho.nodes();
  return WeightedOperator(rho.weighted_dense(), {2, 2, n, n});
}

WeightedOperator polarization_reduction(const SinglePhotonDensity& rho) {
  return reduce(to_operator(rho), {0});
}

WeightedOperator frequency_reduction(const SinglePhotonDensity& rho) {
  return reduce(to_operator(rho), {1});
}

WeightedOperator polarization_reduction(const TwoPhotonDensity& rho) {
  const std::size_t n = rho.nodes();
  const auto& w = rho.grid().weights;
  Eigen::Matrix4cd acc = Eigen::Matrix4cd::Zero();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      acc += (w[a] * w[b]) * rho.block(a, b, a, b);
  return WeightedOperator(Eigen::MatrixXcd(acc), {2, 2});
}

WeightedOperator frequency_reduction(const TwoPhotonDensity& rho) {
  const std::size_t n = rho.nodes();
  const auto& w = rho.grid().weights;
  std::vector<double> sw(n);
  for (std::size_t i = 0; i < n; ++i) sw[i] = std::sqrt(w[i]);
  const auto nn = Eigen::Index(n * n);
  Eigen::MatrixXcd m(nn, nn);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t ap = 0; ap < n; ++ap)
        for (std::size_t bp = 0; bp < n; ++bp)
          m(Eigen::Index(a * n + b), Eigen::Index(ap * n + bp)) =
              (sw[a] * sw[b] * sw[ap] * sw[bp]) *
              rho.block(a, b, ap, bp).trace();
  return WeightedOperator(std::move(m), {n, n});
}

double purity(const WeightedOperator& op) {
  return op.matrix().cwiseAbs2().sum();
}

}  // namespace pmd
