#pragma once

#include <Eigen/Dense>
#include <optional>

namespace nfloc {

enum class ArrayKind { Ula, Upa };

// Per-antenna propagation phase model.
//  - Fresnel: the quadratic distance expansion
//      d_m = r - (m-1) d sin(phi) + (m-1)^2 d^2 / (2r),  ULA only.
//  - Exact: Euclidean distance from the source position to each element.
enum class PhaseModel { Exact, Fresnel };

// Antenna array layout. The reference element (index 1) sits at the origin;
// a ULA extends along the x-axis, a UPA spans the xz-plane. Immutable after
// construction.
class ArrayGeometry {
 public:
  static ArrayGeometry ula(int elements, double spacing);
  static ArrayGeometry upa(int elements_x, int elements_y, double spacing);

  ArrayKind kind() const { return kind_; }
  bool is_ula() const { return kind_ == ArrayKind::Ula; }
  int element_count() const { return static_cast<int>(positions_.cols()); }
  int elements_x() const { return elements_x_; }
  int elements_y() const { return elements_y_; }
  double spacing() const { return spacing_; }

  // 3 x M element coordinates in meters.
  const Eigen::Matrix3Xd& element_positions() const { return positions_; }

  bool operator==(const ArrayGeometry& other) const;

 private:
  ArrayGeometry(ArrayKind kind, int ex, int ey, double spacing);

  ArrayKind kind_;
  int elements_x_;
  int elements_y_;
  double spacing_;
  Eigen::Matrix3Xd positions_;
};

// Angle-range location of a source: azimuth phi, optional elevation psi
// (planar arrays only), and range in meters from the reference element.
// Angles are radians in (-pi/2, pi/2); range must be positive.
struct SourceLocation {
  double phi;
  std::optional<double> psi;
  double range;

  SourceLocation(double phi_rad, double range_m);
  SourceLocation(double phi_rad, double psi_rad, double range_m);

  bool has_elevation() const { return psi.has_value(); }
};

// Aperture length: (M-1)*spacing for a ULA, max(mx,my)*spacing*sqrt(2)
// (diagonal) for a UPA.
double aperture(const ArrayGeometry& geometry);

// Near-field boundary d_FA = 2 * aperture^2 / lambda.
double fraunhofer_distance(const ArrayGeometry& geometry, double lambda);

// Fresnel for ULAs (the quadratic model the estimators assume), Exact for
// UPAs (no planar quadratic form is defined here).
PhaseModel default_phase_model(const ArrayGeometry& geometry);

// Cartesian position of a source under the fixed axis convention:
// ULA source in the xy-plane at (r sin phi, r cos phi, 0); UPA source at
// (r cos psi sin phi, r cos psi cos phi, r sin psi).
Eigen::Vector3d source_position(const SourceLocation& loc);

// Distances from the source to all M elements, in element order.
Eigen::VectorXd element_distances(const ArrayGeometry& geometry, const SourceLocation& loc,
                                  PhaseModel model);

// Spherical-wave array response a_m = exp(j 2 pi / lambda * (d_1 - d_m)).
// Every entry has unit modulus and the reference entry is exactly 1.
Eigen::VectorXcd steering_vector(const ArrayGeometry& geometry, const SourceLocation& loc,
                                 double lambda, PhaseModel model);

Eigen::VectorXcd steering_vector(const ArrayGeometry& geometry, const SourceLocation& loc,
                                 double lambda);

}  // namespace nfloc
