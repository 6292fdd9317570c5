#include <doctest.h>

#include <numbers>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace edrlab;

TEST_CASE("meter_evolved: identity, swap and the shift law") {
  const auto id = identity(fixture::small_grid_spec(ModelKind::kIdentity, 8));
  const auto x8 = position_op(GridSpec{8, 1.0, 1.0});
  CHECK((meter_evolved(id).matrix() - embed(x8, Slot::kProbe, {8, 8}).matrix()).norm() <= 1e-12);

  const auto sw = swap(fixture::small_grid_spec(ModelKind::kSwap, 8));
  CHECK((meter_evolved(sw).matrix() - embed(x8, Slot::kObject, {8, 8}).matrix()).norm() <= 1e-12);
  const auto sq = MeterFunction::polynomial({0.0, 0.0, 1.0});
  CHECK((meter_evolved(sw, sq).matrix() - embed(apply_function(x8, sq), Slot::kObject, {8, 8}).matrix()).norm() <=
        1e-10);

  // Integer shifts on a large probe grid: X(t) = 1 (x) X + x (x) 1 on every
  // state that does not reach the periodic edge.
  ModelSpec spec;
  spec.grid_obj = GridSpec{8, 1.0, 1.0};
  spec.grid_probe = GridSpec{64, 1.0, 1.0};
  spec.probe = GaussianParams{0.0, 0.0, 1.5};
  const auto vn = von_neumann(spec);
  const CMatrix xt = meter_evolved(vn).matrix();
  const CMatrix law = embed(vn.meter(), Slot::kProbe, vn.dims()).matrix() + embed(vn.measured(), Slot::kObject, vn.dims()).matrix();
  Rng rng(23);
  for (int t = 0; t < 5; ++t) {
    const CVector s = kron(haar_state(8, rng).amplitudes(), vn.probe_state().amplitudes());
    CHECK(((xt - law) * s).norm() <= 1e-8);
  }
}

TEST_CASE("object_evolved") {
  const auto x8 = position_op(GridSpec{8, 1.0, 1.0});
  const auto id = identity(fixture::small_grid_spec(ModelKind::kIdentity, 8));
  CHECK((object_evolved(id, x8).matrix() - embed(x8, Slot::kObject, {8, 8}).matrix()).norm() <= 1e-12);
  const auto sw = swap(fixture::small_grid_spec(ModelKind::kSwap, 8));
  CHECK((object_evolved(sw, x8).matrix() - embed(x8, Slot::kProbe, {8, 8}).matrix()).norm() <= 1e-12);

  // p(t) = p (x) 1 - lambda (1 (x) P) on smooth states.
  ModelSpec spec = fixture::von_neumann_spec(1.0, 1.0 / 16.0, 32);
  spec.grid_probe.dx = 0.5;
  const auto vn = von_neumann(spec);
  const CMatrix pt = object_evolved(vn, vn.disturbed()).matrix();
  const CMatrix law = embed(vn.disturbed(), Slot::kObject, vn.dims()).matrix() -
                      embed(momentum_op(spec.grid_probe), Slot::kProbe, vn.dims()).matrix();
  const CVector s = kron(gaussian_state(spec.grid_obj, 0.0, 0.0, 0.125).amplitudes(), vn.probe_state().amplitudes());
  CHECK(((pt - law) * s).norm() <= 1e-6 * (law * s).norm());
}

TEST_CASE("epsilon") {
  // Identity model with aligned eigenstates: |m_k - x_j|.
  const auto base = identity(fixture::small_grid_spec(ModelKind::kIdentity, 8));
  for (auto [j, k] : {std::pair<Index, Index>{1, 6}, {4, 4}, {7, 0}}) {
    const auto proc = fixture::with_probe_state(base, QState::basis(8, k));
    const double expected = std::abs(GridSpec{8, 1.0, 1.0}.position(k) - GridSpec{8, 1.0, 1.0}.position(j));
    CHECK(std::abs(epsilon(proc, QState::basis(8, j)).value - expected) <= 1e-12);
  }

  const auto sw = swap(fixture::small_grid_spec(ModelKind::kSwap, 16, 0.5));
  Rng rng(29);
  for (int t = 0; t < 20; ++t) CHECK(epsilon(sw, haar_state(16, rng)).value <= 1e-10);

  for (double sigma_x : {0.5, 1.0, 2.0}) {
    const auto spec = fixture::von_neumann_spec(sigma_x, 1.0 / 32.0);
    const auto vn = von_neumann(spec);
    const auto e = epsilon(vn, fixture::centered_object_state(spec));
    CHECK(std::abs(e.value - sigma_x) <= 0.01 * sigma_x);
    CHECK(e.mean_square == doctest::Approx(e.value * e.value).epsilon(1e-14));
  }
}

TEST_CASE("delta") {
  const auto base = identity(fixture::small_grid_spec(ModelKind::kIdentity, 8));
  Rng rng(31);
  const auto psi = haar_state(8, rng);
  CHECK(std::abs(delta(base, psi).value - epsilon(base, psi).value) <= 1e-12);

  const auto spec = fixture::von_neumann_spec(1.0, 1.0 / 32.0);
  const auto vn = von_neumann(spec);
  const auto g = fixture::centered_object_state(spec);
  CHECK(std::abs(delta(vn, g).value - 1.0) <= 0.01);
  CHECK(std::abs(delta(vn, g).value - epsilon(vn, g).value) <= 1e-9);

  const auto sspec = fixture::small_grid_spec(ModelKind::kSwap, 32, 0.5, 1.0, 1.0);
  const auto sw = swap(sspec);
  const auto x = position_op(sspec.grid_obj);
  for (auto [x0, sig] : {std::pair{-1.0, 1.5}, {0.0, 0.7}, {2.0, 1.0}}) {
    const auto s = gaussian_state(sspec.grid_obj, x0, 0.3, sig);
    const double sx = spread(s, x), sxi = spread(sw.probe_state(), x);
    const double dm = fixture::mean(s, x) - fixture::mean(sw.probe_state(), x);
    CHECK(std::abs(delta(sw, s).mean_square - (sx * sx + sxi * sxi + dm * dm)) <= 1e-9);
  }
}

TEST_CASE("eta") {
  const auto base = identity(fixture::small_grid_spec(ModelKind::kIdentity, 8));
  Rng rng(37);
  CHECK(eta(base, haar_state(8, rng)).value <= 1e-12);

  for (double sigma_x : {0.5, 1.0, 2.0}) {
    const auto spec = fixture::von_neumann_spec(sigma_x, 1.0 / 32.0);
    const auto vn = von_neumann(spec);
    const double p_rms = std::sqrt(expectation(vn.probe_state(), Observable(
        momentum_op(spec.grid_probe).matrix() * momentum_op(spec.grid_probe).matrix(), Units::kDimensionless)));
    CHECK(std::abs(eta(vn, fixture::centered_object_state(spec)).value - p_rms) <= 0.01 * p_rms);
  }

  const auto sspec = fixture::small_grid_spec(ModelKind::kSwap, 32, 0.5, 1.0, 1.0);
  const auto sw = swap(sspec);
  const auto p = momentum_op(sspec.grid_obj);
  const auto s = gaussian_state(sspec.grid_obj, -1.0, 0.8, 1.2);
  const double sp = spread(s, p), spx = spread(sw.probe_state(), p);
  const double dm = fixture::mean(s, p) - fixture::mean(sw.probe_state(), p);
  CHECK(std::abs(eta(sw, s).mean_square - (sp * sp + spx * spx + dm * dm)) <= 1e-9);
}

TEST_CASE("unbiasedness deficit") {
  const auto centered = von_neumann(fixture::von_neumann_spec(1.0, 1.0 / 32.0));
  CHECK(unbiasedness_deficit(centered).norm <= 1e-9);

  const double mu = 0.8;
  const auto offset = von_neumann(fixture::von_neumann_spec(1.0, 1.0 / 32.0, 64, 1.0, mu));
  const auto d = unbiasedness_deficit(offset);
  CHECK(std::abs(d.norm - mu) <= 1e-9);
  CHECK((d.op.matrix() - mu * CMatrix::Identity(64, 64)).norm() <= 1e-8);
  CHECK(unbiasedness_deficit(offset, MeterFunction::affine(1.0, -mu)).norm <= 1e-9);

  // Cancellation down to rounding must not trip the hermiticity check.
  ModelSpec spec;
  spec.grid_obj = GridSpec{64, 1.0 / 32.0, 1.0};
  spec.grid_probe = GridSpec{64, 0.4, 1.0};
  spec.probe = GaussianParams{0.0, 0.0, 0.5};
  const auto exact = unbiasedness_deficit(von_neumann(spec));
  CHECK(exact.norm <= 1e-9);
  CHECK(exact.op.matrix() == exact.op.matrix().adjoint());
}

TEST_CASE("edr_report") {
  Rng rng(41);
  const auto base = identity(fixture::small_grid_spec(ModelKind::kIdentity, 8));
  const auto r0 = edr_report(base, haar_state(8, rng));
  CHECK(r0.eta <= 1e-12);
  CHECK(r0.prod_eps_eta <= 1e-11);
  CHECK(r0.hbar_half == 0.5);
  CHECK(r0.h == doctest::Approx(2.0 * std::numbers::pi * 2.0 * r0.hbar_half));

  const auto spec = fixture::von_neumann_spec(1.0, 1.0 / 32.0);
  const auto r = edr_report(von_neumann(spec), fixture::centered_object_state(spec));
  CHECK(std::abs(r.prod_eps_eta - 0.5) <= 0.02 * 0.5);
  CHECK(std::abs(r.prod_delta_eta - 0.5) <= 0.02 * 0.5);
  CHECK(r.unbiasedness_deficit <= 1e-9);
  CHECK(r.epsilon == doctest::Approx(std::sqrt(r.epsilon_sq)));
  CHECK(r.sigma_x == doctest::Approx(spec.grid_obj.window() / 16.0).epsilon(1e-6));
}

TEST_CASE("norm identity and agreement with the dense route") {
  Rng rng(43);
  for (int t = 0; t < 5; ++t) {
    const auto proc = oracle::random_process(3, 4, rng);
    const auto psi = haar_state(3, rng);
    const auto bf = oracle::brute_force_mean_squares(proc, psi);
    CHECK(std::abs(epsilon(proc, psi).mean_square - bf.epsilon_sq) <= 1e-12 * std::max(1.0, bf.epsilon_sq));
    CHECK(std::abs(delta(proc, psi).mean_square - bf.delta_sq) <= 1e-12 * std::max(1.0, bf.delta_sq));
    CHECK(std::abs(eta(proc, psi).mean_square - bf.eta_sq) <= 1e-12 * std::max(1.0, bf.eta_sq));
    const double r = perfect_correlation_residual(proc, psi);
    CHECK(std::abs(r * r - epsilon(proc, psi).mean_square) <= 1e-12 * std::max(1.0, r * r));
  }
}

TEST_CASE("monotone trade-off along minimal-uncertainty probes") {
  double prev_eps = 1e300, prev_eta = 0.0;
  for (double sigma_x : {2.0, 1.5, 1.0, 0.75, 0.5}) {
    const auto spec = fixture::von_neumann_spec(sigma_x, 1.0 / 32.0);
    const auto r = edr_report(von_neumann(spec), fixture::centered_object_state(spec));
    CHECK(r.epsilon < prev_eps);
    CHECK(r.eta > prev_eta);
    CHECK(std::abs(r.delta - r.epsilon) <= 1e-10);
    prev_eps = r.epsilon;
    prev_eta = r.eta;
  }
}

TEST_CASE("process validation") {
  const auto base = identity(fixture::small_grid_spec(ModelKind::kIdentity, 8));
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kNumericalInconsistency;
  };
  CHECK(code_of([&] { fixture::with_probe_state(base, QState::basis(4, 0)); }) == ErrorCode::kDimMismatch);
  CHECK(code_of([&] { epsilon(base, QState::basis(3, 0)); }) == ErrorCode::kDimMismatch);
  CHECK(code_of([&] {
          MeasurementProcess(base.dims(), base.probe_state(), base.interaction(), base.meter(), base.measured(),
                             Observable(base.disturbed().matrix(), Units::kLength), 1.0);
        }) == ErrorCode::kConfig);
}
