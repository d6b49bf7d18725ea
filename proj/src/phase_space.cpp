#include "cocontact/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <stdexcept>

#include "cocontact/errors.hpp"

namespace cocontact {

std::string ChartSpec::coordinate_name(std::size_t k) const {
  if (k >= dim()) throw std::out_of_range("coordinate index out of range");
  if (k == 0) return "t";
  if (k == z_index()) return "z";
  if (k <= n) return "q" + std::to_string(k);
  return (kind == ChartKind::hamiltonian ? "p" : "v") + std::to_string(k - n);
}

std::vector<std::string> ChartSpec::coordinate_names() const {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < dim(); ++k) names.push_back(coordinate_name(k));
  return names;
}

std::optional<std::size_t> ChartSpec::index_of(std::string_view name) const {
  if (name == "t") return 0;
  if (name == "z") return z_index();
  if (name.size() < 2) return std::nullopt;
  const char head = name.front();
  const char fiber = kind == ChartKind::hamiltonian ? 'p' : 'v';
  if (head != 'q' && head != fiber) return std::nullopt;
  if (name[1] == '0') return std::nullopt;
  std::size_t i = 0;
  auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), i);
  if (ec != std::errc() || ptr != name.data() + name.size() || i < 1 || i > n) return std::nullopt;
  return head == 'q' ? q_index(i - 1) : fiber_index(i - 1);
}

PhasePoint::PhasePoint(double t, std::span<const double> q, std::span<const double> fiber,
                       double z) {
  if (q.size() != fiber.size()) throw std::invalid_argument("q and fiber sizes differ");
  coords_.reserve(2 * q.size() + 2);
  coords_.push_back(t);
  coords_.insert(coords_.end(), q.begin(), q.end());
  coords_.insert(coords_.end(), fiber.begin(), fiber.end());
  coords_.push_back(z);
}

bool PhasePoint::finite() const {
  return std::all_of(coords_.begin(), coords_.end(), [](double x) { return std::isfinite(x); });
}

namespace {

void require_hamiltonian(const ChartSpec& chart) {
  if (chart.kind != ChartKind::hamiltonian)
    throw ChartMismatch("operation requires a hamiltonian (Darboux) chart");
}

void require_dim(const ChartSpec& chart, std::size_t d) {
  if (d != chart.dim()) throw std::invalid_argument("vector dimension does not match chart");
}

}  // namespace

TangentVector unit_vector(const ChartSpec& chart, std::size_t k) {
  TangentVector v{std::vector<double>(chart.dim(), 0.0)};
  v.c.at(k) = 1.0;
  return v;
}

double tau_pair(const TangentVector& v) { return v.c.at(0); }

double eta_pair(const ChartSpec& chart, const PhasePoint& x, const TangentVector& v) {
  require_hamiltonian(chart);
  require_dim(chart, v.dim());
  double r = v[chart.z_index()];
  for (std::size_t i = 0; i < chart.n; ++i) r -= x.fiber(i) * v[chart.q_index(i)];
  return r;
}

double deta_pair(const ChartSpec& chart, const TangentVector& u, const TangentVector& v) {
  require_hamiltonian(chart);
  require_dim(chart, u.dim());
  require_dim(chart, v.dim());
  double r = 0.0;
  for (std::size_t i = 0; i < chart.n; ++i) {
    const std::size_t q = chart.q_index(i), p = chart.fiber_index(i);
    r += u[q] * v[p] - u[p] * v[q];
  }
  return r;
}

CoVector tau_form(const ChartSpec& chart) {
  CoVector a{std::vector<double>(chart.dim(), 0.0)};
  a[0] = 1.0;
  return a;
}

CoVector eta_form(const ChartSpec& chart, const PhasePoint& x) {
  require_hamiltonian(chart);
  CoVector a{std::vector<double>(chart.dim(), 0.0)};
  a[chart.z_index()] = 1.0;
  for (std::size_t i = 0; i < chart.n; ++i) a[chart.q_index(i)] = -x.fiber(i);
  return a;
}

CoVector contract_deta(const ChartSpec& chart, const TangentVector& v) {
  require_hamiltonian(chart);
  require_dim(chart, v.dim());
  CoVector a{std::vector<double>(chart.dim(), 0.0)};
  for (std::size_t i = 0; i < chart.n; ++i) {
    a[chart.q_index(i)] = -v[chart.fiber_index(i)];
    a[chart.fiber_index(i)] = v[chart.q_index(i)];
  }
  return a;
}

CoVector flat(const ChartSpec& chart, const PhasePoint& x, const TangentVector& v) {
  const double ev = eta_pair(chart, x, v);
  CoVector a = contract_deta(chart, v);
  a[0] += v[0];
  const CoVector eta = eta_form(chart, x);
  for (std::size_t k = 0; k < a.dim(); ++k) a[k] += ev * eta[k];
  return a;
}

TangentVector flat_inv(const ChartSpec& chart, const PhasePoint& x, const CoVector& alpha) {
  require_hamiltonian(chart);
  require_dim(chart, alpha.dim());
  TangentVector v{std::vector<double>(chart.dim(), 0.0)};
  const double eta_v = alpha[chart.z_index()];
  v[0] = alpha[0];
  double z = eta_v;
  for (std::size_t i = 0; i < chart.n; ++i) {
    const std::size_t q = chart.q_index(i), p = chart.fiber_index(i);
    v[q] = alpha[p];
    v[p] = -(alpha[q] + x.fiber(i) * eta_v);
    z += x.fiber(i) * alpha[p];
  }
  v[chart.z_index()] = z;
  return v;
}

TangentVector reeb_t(const ChartSpec& chart) { return unit_vector(chart, 0); }
TangentVector reeb_z(const ChartSpec& chart) { return unit_vector(chart, chart.z_index()); }

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace cocontact
