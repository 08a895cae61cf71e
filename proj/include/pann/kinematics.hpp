#pragma once

#include <span>
#include <vector>

#include "pann/tensor.hpp"

namespace pann {

/// Isochoric invariants of C = F^T F plus the normalized parameter vector.
struct InvariantState {
  double i1_bar = 3.0;
  double i2_bar = 3.0;
  std::vector<double> t;
};

struct IsochoricInvariants {
  double i1_bar;
  double i2_bar;
};

/// First and second derivatives of the isochoric invariants with respect to F.
struct InvariantDerivatives {
  Tensor3 d_i1;
  Tensor3 d_i2;
  Tensor4 d2_i1;
  Tensor4 d2_i2;
};

enum class ModeKind { UniaxialTension, EquibiaxialTension, PureShear, SimpleShear, PrincipalStretchGrid };

/// A family of homogeneous deformations on SL(3).
///
/// For the one-parameter modes `stretches` lists the stretch (or, for
/// SimpleShear, the shear amount gamma). For PrincipalStretchGrid the
/// generated set is the Cartesian product `stretches` x `stretches2`.
struct DeformationMode {
  ModeKind kind = ModeKind::UniaxialTension;
  std::vector<double> stretches;
  std::vector<double> stretches2;
};

/// (det f) f^{-T}, computed from the signed minors.
Tensor3 cofactor(const Tensor3& f);

/// (a ⨯ b)_iI = E_ijk E_IJK a_jJ b_kK
Tensor3 tensor_cross(const Tensor3& a, const Tensor3& b);

Tensor3 inverse(const Tensor3& f);

IsochoricInvariants isochoric_invariants(const Tensor3& f);

InvariantDerivatives invariant_derivatives(const Tensor3& f);

std::vector<Tensor3> generate_mode(const DeformationMode& mode);

/// F = diag(l1, l2, 1 / (l1 l2))
Tensor3 principal_stretch_state(double l1, double l2);

/// Uniaxial isochoric invariants for stretch lambda: (l^2 + 2/l, 2l + 1/l^2).
IsochoricInvariants uniaxial_invariants(double lambda);

/// Principal stretches of f (square roots of the eigenvalues of f^T f), ascending.
Vec3 principal_stretches(const Tensor3& f);

}  // namespace pann
