#include "cocontact/errors.hpp"
#include "cocontact/phase_space.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cocontact;

TEST_CASE("chart vocabulary") {
  const ChartSpec h{2, ChartKind::hamiltonian}, l{2, ChartKind::lagrangian};
  CHECK(h.dim() == 6);
  CHECK(h.coordinate_names() == std::vector<std::string>{"t", "q1", "q2", "p1", "p2", "z"});
  CHECK(l.coordinate_names() == std::vector<std::string>{"t", "q1", "q2", "v1", "v2", "z"});
  CHECK(h.index_of("p2") == 4u);
  CHECK_FALSE(h.index_of("v1"));
  CHECK_FALSE(h.index_of("q3"));
  CHECK_FALSE(h.index_of("q01"));
  CHECK_FALSE(h.index_of("q0"));
}

TEST_CASE("eta and tau pairings") {
  const ChartSpec c{1, ChartKind::hamiltonian};
  const PhasePoint origin({0, 0, 0, 0});
  CHECK(eta_pair(c, origin, reeb_z(c)) == 1.0);
  const PhasePoint p2({0, 0, 2, 0});
  CHECK(eta_pair(c, p2, unit_vector(c, 1)) == -2.0);
  CHECK(eta_pair(c, p2, reeb_t(c)) == 0.0);
  CHECK(tau_pair(reeb_t(c)) == 1.0);
  CHECK_THROWS_AS(eta_pair(ChartSpec{1, ChartKind::lagrangian}, p2, reeb_t(c)), ChartMismatch);
}

TEST_CASE("d eta pairing") {
  const ChartSpec c{1, ChartKind::hamiltonian};
  CHECK(deta_pair(c, unit_vector(c, 1), unit_vector(c, 2)) == 1.0);
  testing::Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const TangentVector v{rng.vec(4, -3, 3)}, w{rng.vec(4, -3, 3)};
    CHECK(deta_pair(c, reeb_t(c), v) == 0.0);
    CHECK(deta_pair(c, reeb_z(c), v) == 0.0);
    CHECK(deta_pair(c, v, w) == -deta_pair(c, w, v));
  }
}

TEST_CASE("flat and its inverse") {
  const ChartSpec c{2, ChartKind::hamiltonian};
  testing::Rng rng(2);
  const PhasePoint x = rng.point(c.dim(), -2, 2);
  CHECK(flat(c, x, reeb_t(c)).c == tau_form(c).c);
  CHECK(flat(c, x, reeb_z(c)).c == eta_form(c, x).c);
  for (int i = 0; i < 100; ++i) {
    const PhasePoint y = rng.point(c.dim(), -3, 3);
    const TangentVector v{rng.vec(c.dim(), -3, 3)};
    const TangentVector back = flat_inv(c, y, flat(c, y, v));
    for (std::size_t k = 0; k < c.dim(); ++k) CHECK(std::abs(back[k] - v[k]) < 1e-12);
    // flat applied componentwise: (i_V tau) tau + i_V d eta + (i_V eta) eta against pairings.
    const CoVector a = flat(c, y, v);
    const TangentVector w{rng.vec(c.dim(), -3, 3)};
    double aw = 0.0;
    for (std::size_t k = 0; k < c.dim(); ++k) aw += a[k] * w[k];
    const double expect = tau_pair(v) * tau_pair(w) + deta_pair(c, v, w) + eta_pair(c, y, v) * eta_pair(c, y, w);
    CHECK(std::abs(aw - expect) < 1e-11);
  }
}

TEST_CASE("Reeb identities at random points") {
  const ChartSpec c{3, ChartKind::hamiltonian};
  testing::Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    const PhasePoint x = rng.point(c.dim(), -5, 5);
    CHECK(tau_pair(reeb_t(c)) == 1.0);
    CHECK(eta_pair(c, x, reeb_t(c)) == 0.0);
    CHECK(max_abs(contract_deta(c, reeb_t(c)).c) == 0.0);
    CHECK(tau_pair(reeb_z(c)) == 0.0);
    CHECK(eta_pair(c, x, reeb_z(c)) == 1.0);
    CHECK(max_abs(contract_deta(c, reeb_z(c)).c) == 0.0);
  }
}
