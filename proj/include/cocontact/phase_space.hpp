#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cocontact {

enum class ChartKind { hamiltonian, lagrangian };

/// Darboux chart of R x T*Q x R (hamiltonian) or R x TQ x R (lagrangian).
/// Coordinates are ordered t, q1..qn, p1..pn (or v1..vn), z.
struct ChartSpec {
  std::size_t n = 1;
  ChartKind kind = ChartKind::hamiltonian;

  std::size_t dim() const noexcept { return 2 * n + 2; }
  static constexpr std::size_t t_index() noexcept { return 0; }
  std::size_t q_index(std::size_t i) const noexcept { return 1 + i; }
  /// Index of p_i (hamiltonian) or v_i (lagrangian), 0-based i.
  std::size_t fiber_index(std::size_t i) const noexcept { return 1 + n + i; }
  std::size_t z_index() const noexcept { return 2 * n + 1; }

  /// Name of coordinate k ("t", "q1", "p1"/"v1", "z").
  std::string coordinate_name(std::size_t k) const;
  std::vector<std::string> coordinate_names() const;
  /// Coordinate index for a name, if it belongs to this chart.
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const ChartSpec&, const ChartSpec&) = default;
};

/// Point (t, q, p_or_v, z) stored flat in chart order.
class PhasePoint {
 public:
  PhasePoint() = default;
  explicit PhasePoint(std::vector<double> coords) : coords_(std::move(coords)) {}
  PhasePoint(double t, std::span<const double> q, std::span<const double> fiber, double z);

  std::size_t dim() const noexcept { return coords_.size(); }
  std::size_t n() const noexcept { return (coords_.size() - 2) / 2; }
  double t() const { return coords_.front(); }
  double z() const { return coords_.back(); }
  double q(std::size_t i) const { return coords_[1 + i]; }
  double fiber(std::size_t i) const { return coords_[1 + n() + i]; }
  double operator[](std::size_t k) const { return coords_[k]; }
  double& operator[](std::size_t k) { return coords_[k]; }
  std::span<const double> coords() const noexcept { return coords_; }
  std::vector<double>& data() noexcept { return coords_; }

  bool finite() const;

 private:
  std::vector<double> coords_;
};

/// Components in the coordinate basis (d/dt, d/dq, d/dp, d/dz).
struct TangentVector {
  std::vector<double> c;
  std::size_t dim() const noexcept { return c.size(); }
  double operator[](std::size_t k) const { return c[k]; }
  double& operator[](std::size_t k) { return c[k]; }
};

/// Components in the dual basis (dt, dq, dp, dz).
struct CoVector {
  std::vector<double> c;
  std::size_t dim() const noexcept { return c.size(); }
  double operator[](std::size_t k) const { return c[k]; }
  double& operator[](std::size_t k) { return c[k]; }
};

TangentVector unit_vector(const ChartSpec& chart, std::size_t k);

double tau_pair(const TangentVector& v);
/// eta = dz - p_i dq^i. Hamiltonian charts only.
double eta_pair(const ChartSpec& chart, const PhasePoint& x, const TangentVector& v);
/// d eta(U, V) = sum_i (U_q V_p - U_p V_q).
double deta_pair(const ChartSpec& chart, const TangentVector& u, const TangentVector& v);

CoVector tau_form(const ChartSpec& chart);
CoVector eta_form(const ChartSpec& chart, const PhasePoint& x);
/// i_V d eta as a covector.
CoVector contract_deta(const ChartSpec& chart, const TangentVector& v);

/// flat(V) = tau(V) tau + i_V d eta + eta(V) eta.
CoVector flat(const ChartSpec& chart, const PhasePoint& x, const TangentVector& v);
TangentVector flat_inv(const ChartSpec& chart, const PhasePoint& x, const CoVector& alpha);

/// Time and contact Reeb fields in Darboux coordinates.
TangentVector reeb_t(const ChartSpec& chart);
TangentVector reeb_z(const ChartSpec& chart);

double max_abs(std::span<const double> v);

}  // namespace cocontact
