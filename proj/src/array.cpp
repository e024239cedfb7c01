#include "nfloc/array.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace nfloc {

namespace {
constexpr double kHalfPi = std::numbers::pi / 2.0;

void check_angle(double value, const char* name) {
  if (!(value > -kHalfPi && value < kHalfPi)) {
    throw std::invalid_argument(std::string(name) + " must lie in (-pi/2, pi/2)");
  }
}
}  // namespace

ArrayGeometry::ArrayGeometry(ArrayKind kind, int ex, int ey, double spacing)
    : kind_(kind), elements_x_(ex), elements_y_(ey), spacing_(spacing) {
  if (spacing <= 0.0) throw std::invalid_argument("element spacing must be positive");
  if (kind == ArrayKind::Ula) {
    if (ex < 2) throw std::invalid_argument("a ULA needs at least 2 elements");
    positions_.resize(3, ex);
    for (int m = 0; m < ex; ++m) positions_.col(m) = Eigen::Vector3d(m * spacing, 0.0, 0.0);
  } else {
    if (ex < 2 || ey < 2) {
      throw std::invalid_argument("a UPA needs at least 2 elements per dimension");
    }
    positions_.resize(3, static_cast<Eigen::Index>(ex) * ey);
    // Row-major over the xz-plane; element 1 (index 0) at the origin.
    for (int iy = 0; iy < ey; ++iy) {
      for (int ix = 0; ix < ex; ++ix) {
        positions_.col(static_cast<Eigen::Index>(iy) * ex + ix) =
            Eigen::Vector3d(ix * spacing, 0.0, iy * spacing);
      }
    }
  }
}

ArrayGeometry ArrayGeometry::ula(int elements, double spacing) {
  return {ArrayKind::Ula, elements, 1, spacing};
}

ArrayGeometry ArrayGeometry::upa(int elements_x, int elements_y, double spacing) {
  return {ArrayKind::Upa, elements_x, elements_y, spacing};
}

bool ArrayGeometry::operator==(const ArrayGeometry& other) const {
  return kind_ == other.kind_ && elements_x_ == other.elements_x_ &&
         elements_y_ == other.elements_y_ && spacing_ == other.spacing_;
}

SourceLocation::SourceLocation(double phi_rad, double range_m) : phi(phi_rad), range(range_m) {
  check_angle(phi, "phi");
  if (!(range > 0.0)) throw std::invalid_argument("range must be positive");
}

SourceLocation::SourceLocation(double phi_rad, double psi_rad, double range_m)
    : phi(phi_rad), psi(psi_rad), range(range_m) {
  check_angle(phi, "phi");
  check_angle(psi_rad, "psi");
  if (!(range > 0.0)) throw std::invalid_argument("range must be positive");
}

double aperture(const ArrayGeometry& geometry) {
  if (geometry.is_ula()) {
    return (geometry.element_count() - 1) * geometry.spacing();
  }
  const int side = std::max(geometry.elements_x(), geometry.elements_y());
  return side * geometry.spacing() * std::numbers::sqrt2;
}

double fraunhofer_distance(const ArrayGeometry& geometry, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  const double ap = aperture(geometry);
  return 2.0 * ap * ap / lambda;
}

PhaseModel default_phase_model(const ArrayGeometry& geometry) {
  return geometry.is_ula() ? PhaseModel::Fresnel : PhaseModel::Exact;
}

Eigen::Vector3d source_position(const SourceLocation& loc) {
  if (loc.has_elevation()) {
    const double ce = std::cos(*loc.psi);
    return {loc.range * ce * std::sin(loc.phi), loc.range * ce * std::cos(loc.phi),
            loc.range * std::sin(*loc.psi)};
  }
  return {loc.range * std::sin(loc.phi), loc.range * std::cos(loc.phi), 0.0};
}

Eigen::VectorXd element_distances(const ArrayGeometry& geometry, const SourceLocation& loc,
                                  PhaseModel model) {
  const int m = geometry.element_count();
  Eigen::VectorXd d(m);
  if (model == PhaseModel::Fresnel) {
    if (!geometry.is_ula()) {
      throw std::invalid_argument("the Fresnel phase model is defined for ULAs only");
    }
    const double delta = geometry.spacing();
    const double sin_phi = std::sin(loc.phi);
    for (int i = 0; i < m; ++i) {
      const double offset = i * delta;  // (m-1) * delta
      d(i) = loc.range - offset * sin_phi + offset * offset / (2.0 * loc.range);
    }
    return d;
  }
  if (geometry.is_ula() == loc.has_elevation()) {
    throw std::invalid_argument(geometry.is_ula() ? "a ULA location carries no elevation angle"
                                                  : "a UPA location needs an elevation angle");
  }
  const Eigen::Vector3d p = source_position(loc);
  for (int i = 0; i < m; ++i) {
    d(i) = (p - geometry.element_positions().col(i)).norm();
  }
  return d;
}

Eigen::VectorXcd steering_vector(const ArrayGeometry& geometry, const SourceLocation& loc,
                                 double lambda, PhaseModel model) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  const Eigen::VectorXd d = element_distances(geometry, loc, model);
  const double wavenumber = 2.0 * std::numbers::pi / lambda;
  const int m = geometry.element_count();
  Eigen::VectorXcd a(m);
  a(0) = {1.0, 0.0};
  for (int i = 1; i < m; ++i) {
    a(i) = std::polar(1.0, wavenumber * (d(0) - d(i)));
  }
  return a;
}

Eigen::VectorXcd steering_vector(const ArrayGeometry& geometry, const SourceLocation& loc,
                                 double lambda) {
  return steering_vector(geometry, loc, lambda, default_phase_model(geometry));
}

}  // namespace nfloc
