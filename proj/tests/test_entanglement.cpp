#include <doctest.h>

#include "pmd/analytic_common.hpp"
#include "pmd/analytic_separate.hpp"
#include "pmd/analytic_single.hpp"
#include "pmd/entanglement.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <numbers>
#include <random>

using namespace pmd;

namespace {

struct QuietWarnings {
  QuietWarnings() { set_warning_handler([](const std::string&) {}); }
  ~QuietWarnings() { set_warning_handler(nullptr); }
};

Eigen::MatrixXcd random_density(std::size_t n, std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = cplx(g(gen), g(gen));
  Eigen::MatrixXcd rho = a * a.adjoint();
  return rho / rho.trace().real();
}

Eigen::Matrix2cd random_unitary(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  const double t = u(gen) / 4.0, p1 = u(gen), p2 = u(gen), p3 = u(gen);
  Eigen::Matrix2cd m;
  m << std::polar(std::cos(t), p1), std::polar(std::sin(t), p2),
      -std::polar(std::sin(t), p3 - p2), std::polar(std::cos(t), p3 - p1);
  return m;
}

Eigen::Matrix4cd singlet_projector() {
  const Eigen::Vector4cd s = bell_amplitudes(BellLabel::singlet).cast<cplx>();
  return s * s.adjoint();
}

// Two-qubit polarization reduction of the separate-fiber singlet.
Eigen::Matrix4cd werner_like(double chi) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = m(3, 3) = 0.25 * (1.0 - chi);
  m(1, 1) = m(2, 2) = 0.25 * (1.0 + chi);
  m(1, 2) = m(2, 1) = -0.5 * chi;
  return m;
}

WeightedOperator qubits(const Eigen::Matrix4cd& m) {
  return WeightedOperator(Eigen::MatrixXcd(m), {2, 2});
}

}  // namespace

TEST_CASE("composite indices") {
  CHECK(composite_index({2, 3, 4}, {1, 2, 3}) == 1 * 12 + 2 * 4 + 3);
  CHECK(composite_index({2, 2}, {0, 0}) == 0);
  CHECK_THROWS_AS(composite_index({2, 2}, {2, 0}), Error);
  CHECK_THROWS_AS(composite_index({2, 2}, {1}), Error);
}

TEST_CASE("operator construction is validated") {
  CHECK_THROWS_AS(WeightedOperator(Eigen::MatrixXcd::Identity(5, 5), {2, 2}), Error);
  CHECK_THROWS_AS(WeightedOperator(Eigen::MatrixXcd::Identity(4, 3), {2, 2}), Error);
  const auto op = qubits(singlet_projector());
  CHECK_THROWS_AS(partial_transpose(op, std::vector<std::size_t>{2}), Error);
  CHECK_THROWS_AS(partial_transpose(op, std::vector<std::size_t>{0, 0}), Error);
  CHECK_THROWS_AS(reduce(op, {3}), Error);
}

TEST_CASE("partial transpose of the singlet") {
  const auto op = qubits(singlet_projector());
  for (auto which : {Subsystem::A, Subsystem::B}) {
    const auto pt = partial_transpose(op, which);
    const Eigen::VectorXd ev = hermitian_eigenvalues(pt.matrix());
    CHECK(ev(0) == doctest::Approx(-0.5).epsilon(1e-14));
    for (int i = 1; i < 4; ++i) CHECK(ev(i) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(pt.trace() == op.trace());
    CHECK(pt.hermiticity_error() < 1e-15);
  }
}

TEST_CASE("partial transpose is an involution and preserves the trace") {
  std::mt19937_64 gen(1);
  for (int k = 0; k < 20; ++k) {
    const WeightedOperator op(random_density(12, gen), {2, 3, 2});
    for (const auto& f : {std::vector<std::size_t>{0}, std::vector<std::size_t>{1, 2},
                          std::vector<std::size_t>{0, 2}}) {
      const auto pt = partial_transpose(op, f);
      CHECK(pt.trace() == op.trace());
      CHECK(partial_transpose(pt, f).matrix() == op.matrix());
      CHECK(pt.hermiticity_error() < 1e-15);
    }
  }
}

TEST_CASE("product states have positive partial transpose") {
  std::mt19937_64 gen(2);
  for (int k = 0; k < 20; ++k) {
    const Eigen::MatrixXcd a = random_density(2, gen), b = random_density(3, gen);
    const Eigen::MatrixXcd prod = Eigen::kroneckerProduct(a, b);
    const WeightedOperator op(prod, {2, 3});
    const auto pt = partial_transpose(op, Subsystem::A);
    const Eigen::MatrixXcd expected = Eigen::kroneckerProduct(Eigen::MatrixXcd(a.transpose()), b);
    CHECK((pt.matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);
    NegativityOptions opt;
    opt.trace_norm_check = true;
    const auto n = bipartite_negativity(op, {0}, opt);
    CHECK(std::abs(n.negativity) < 1e-10);
    CHECK(std::abs(n.trace_norm_negativity) < 1e-10);
  }
}

TEST_CASE("negativity of the two-qubit reduction") {
  CHECK(bipartite_negativity(qubits(werner_like(1.0)), {0}).negativity ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(bipartite_negativity(qubits(werner_like(1.0 / 3.0)), {0}).negativity < 1e-10);
  CHECK(bipartite_negativity(qubits(werner_like(0.1)), {0}).negativity == 0.0);
  for (double chi : {0.4, 0.6, 0.9}) {
    NegativityOptions opt;
    opt.trace_norm_check = true;
    const auto n = bipartite_negativity(qubits(werner_like(chi)), {0}, opt);
    CHECK(n.negativity == doctest::Approx(0.75 * chi - 0.25).epsilon(1e-13));
    CHECK(n.min_eigenvalue == doctest::Approx(0.25 * (1.0 - 3.0 * chi)).epsilon(1e-13));
    CHECK(std::abs(n.trace_norm_negativity - n.negativity) < 1e-9);
  }
}

TEST_CASE("negativity cutoff") {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity() * 0.25;
  m(0, 0) -= 1e-11;
  m(1, 1) += 1e-11;
  const WeightedOperator op(Eigen::MatrixXcd(m), {2, 2});
  CHECK(negativity(op).negativity == 0.0);
  NegativityOptions opt;
  opt.cutoff = 0.0;
  m(0, 0) = -1e-11;
  const auto n = negativity(WeightedOperator(Eigen::MatrixXcd(m), {2, 2}), opt);
  CHECK(n.negativity == doctest::Approx(1e-11));
  CHECK(n.cutoff == 0.0);
}

TEST_CASE("non-Hermitian operators are rejected") {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(4, 4);
  m(0, 1) = cplx(0.0, 0.5);
  CHECK_THROWS_AS(negativity(WeightedOperator(m, {2, 2})), Error);
}

TEST_CASE("negativity is invariant under local unitaries") {
  std::mt19937_64 gen(3);
  for (int k = 0; k < 30; ++k) {
    const Eigen::MatrixXcd rho = random_density(4, gen);
    const Eigen::MatrixXcd u =
        Eigen::kroneckerProduct(random_unitary(gen), random_unitary(gen));
    const Eigen::MatrixXcd rotated = u * rho * u.adjoint();
    const double n0 = bipartite_negativity(WeightedOperator(rho, {2, 2}), {0}).negativity;
    const double n1 = bipartite_negativity(WeightedOperator(rotated, {2, 2}), {0}).negativity;
    CHECK(std::abs(n1 - n0) < 1e-9);
  }
}

TEST_CASE("trace-norm and eigenvalue negativities agree on engine outputs") {
  QuietWarnings quiet;
  const auto f = make_dispersion(FiberParameters{});
  const auto env = PulseEnvelope::pair(10.0, 5.0, 1.0);
  const auto g = make_grid(env, 6);
  NegativityOptions opt;
  opt.trace_norm_check = true;
  opt.cutoff = 0.0;
  for (double l : {0.0, 0.03, 0.3}) {
    for (const auto& rho : {evolve_separate_singlet(env, f, l, g),
                            evolve_common_singlet(env, f, l, g)}) {
      const auto full = to_operator(rho);
      for (const auto& factors : {std::vector<std::size_t>{0}, std::vector<std::size_t>{0, 2}}) {
        const auto n = bipartite_negativity(full, factors, opt);
        CHECK(std::abs(n.negativity - n.trace_norm_negativity) < 1e-9);
      }
      const auto nf = bipartite_negativity(frequency_reduction(rho), {0}, opt);
      CHECK(std::abs(nf.negativity - nf.trace_norm_negativity) < 1e-9);
    }
  }
}

TEST_CASE("partial traces") {
  std::mt19937_64 gen(4);
  const Eigen::MatrixXcd a = random_density(2, gen), b = random_density(5, gen);
  const WeightedOperator prod(Eigen::kroneckerProduct(a, b).eval(), {2, 5});
  CHECK((reduce(prod, {0}).matrix() - a).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((reduce(prod, {1}).matrix() - b).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(reduce(prod, {1}).trace() == doctest::Approx(prod.trace()).epsilon(1e-15));

  Eigen::VectorXcd va(2), vb(5);
  std::normal_distribution<double> nd;
  for (Eigen::Index i = 0; i < 2; ++i) va(i) = cplx(nd(gen), nd(gen));
  for (Eigen::Index i = 0; i < 5; ++i) vb(i) = cplx(nd(gen), nd(gen));
  va.normalize();
  vb.normalize();
  const Eigen::VectorXcd psi = Eigen::kroneckerProduct(va, vb);
  const WeightedOperator pure(psi * psi.adjoint(), {2, 5});
  CHECK(purity(reduce(pure, {0})) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(purity(reduce(pure, {1})) == doctest::Approx(1.0).epsilon(1e-14));

  const WeightedOperator three(random_density(12, gen), {2, 3, 2});
  const auto r02 = reduce(three, {0, 2});
  CHECK(r02.dims() == std::vector<std::size_t>{2, 2});
  CHECK(r02.trace() == doctest::Approx(three.trace()).epsilon(1e-14));
  CHECK((reduce(r02, {0}).matrix() - reduce(three, {0}).matrix()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("two-photon reductions agree with the full composite operator") {
  QuietWarnings quiet;
  const auto f = make_dispersion(FiberParameters{});
  const auto env = PulseEnvelope::pair(10.0, 5.0, 1.0);
  const auto g = make_grid(env, 5);
  const auto rho = evolve_common_singlet(env, f, 0.2, g);
  const auto full = to_operator(rho);
  CHECK((reduce(full, {0, 1}).matrix() - polarization_reduction(rho).matrix())
            .cwiseAbs()
            .maxCoeff() < 1e-15);
  CHECK((reduce(full, {2, 3}).matrix() - frequency_reduction(rho).matrix())
            .cwiseAbs()
            .maxCoeff() < 1e-15);
}

TEST_CASE("single-photon reductions") {
  const auto f = make_dispersion(FiberParameters{});
  const auto env = PulseEnvelope::single(0.05, 1.0);
  const auto g = make_grid(env, 32);
  const auto rho = evolve_single_analytic(env, f, 1.0, g);
  const auto pol = polarization_reduction(rho);
  const auto freq = frequency_reduction(rho);
  CHECK(pol.trace() == doctest::Approx(rho.trace()).epsilon(1e-14));
  CHECK(freq.trace() == doctest::Approx(rho.trace()).epsilon(1e-14));
  CHECK(pol.dims() == std::vector<std::size_t>{2});
  CHECK(freq.dims() == std::vector<std::size_t>{32});
  const Eigen::Matrix2d mixed = Eigen::Matrix2d::Identity() * 0.5;
  CHECK(purity(WeightedOperator(mixed.cast<cplx>(), {2})) == 0.5);
}

TEST_CASE("principal submatrices of the partial transpose") {
  const WeightedOperator id(Eigen::MatrixXcd::Identity(16, 16) / 16.0, {4, 4});
  for (std::size_t r1 = 0; r1 < 16; r1 += 3)
    for (std::size_t r2 = 1; r2 < 16; r2 += 5)
      if (r1 != r2) CHECK_FALSE(ppt_submatrix(id, {0}, r1, r2).negative);
  CHECK_THROWS_AS(ppt_submatrix(id, {0}, 0, 16), Error);

  const auto op = qubits(singlet_projector());
  const auto sub = ppt_submatrix(op, {0}, 0, 3);
  CHECK(sub.negative);
  CHECK(sub.margin == doctest::Approx(0.25).epsilon(1e-14));
  const auto pt = partial_transpose(op, Subsystem::A);
  CHECK(sub.matrix(0, 1) == pt.matrix()(0, 3));
}
