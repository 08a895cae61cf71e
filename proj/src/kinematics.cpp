#include "pann/kinematics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fmt/format.h>

#include "pann/error.hpp"

namespace pann {

namespace {

// Levi-Civita symbol for indices in {0,1,2}.
constexpr double levi_civita(std::size_t i, std::size_t j, std::size_t k) noexcept {
  return static_cast<double>((static_cast<int>(i) - static_cast<int>(j)) *
                             (static_cast<int>(j) - static_cast<int>(k)) *
                             (static_cast<int>(k) - static_cast<int>(i))) /
         2.0;
}

void require_positive_det(double j) {
  if (!(j > 0.0) || !std::isfinite(j)) {
    throw Error(ErrorCode::InvertedConfiguration, fmt::format("det F = {} is not positive", j));
  }
}

void require_stretch(double l) {
  if (!(l > 0.0) || !std::isfinite(l)) {
    throw Error(ErrorCode::InvalidStretch, fmt::format("stretch {} must be positive", l));
  }
}

}  // namespace

Tensor3 cofactor(const Tensor3& f) {
  const double d = det(f);
  const double scale = norm(f);
  if (d == 0.0 || std::fabs(d) <= 1e-14 * scale * scale * scale) {
    throw Error(ErrorCode::SingularTensor, fmt::format("det = {}", d));
  }
  Tensor3 h;
  h(0, 0) = f(1, 1) * f(2, 2) - f(1, 2) * f(2, 1);
  h(0, 1) = f(1, 2) * f(2, 0) - f(1, 0) * f(2, 2);
  h(0, 2) = f(1, 0) * f(2, 1) - f(1, 1) * f(2, 0);
  h(1, 0) = f(0, 2) * f(2, 1) - f(0, 1) * f(2, 2);
  h(1, 1) = f(0, 0) * f(2, 2) - f(0, 2) * f(2, 0);
  h(1, 2) = f(0, 1) * f(2, 0) - f(0, 0) * f(2, 1);
  h(2, 0) = f(0, 1) * f(1, 2) - f(0, 2) * f(1, 1);
  h(2, 1) = f(0, 2) * f(1, 0) - f(0, 0) * f(1, 2);
  h(2, 2) = f(0, 0) * f(1, 1) - f(0, 1) * f(1, 0);
  return h;
}

Tensor3 tensor_cross(const Tensor3& a, const Tensor3& b) {
  Tensor3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t ii = 0; ii < 3; ++ii) {
      double s = 0.0;
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 3; ++k) {
          const double eps_row = levi_civita(i, j, k);
          if (eps_row == 0.0) continue;
          for (std::size_t jj = 0; jj < 3; ++jj)
            for (std::size_t kk = 0; kk < 3; ++kk) {
              const double eps_col = levi_civita(ii, jj, kk);
              if (eps_col == 0.0) continue;
              s += eps_row * eps_col * a(j, jj) * b(k, kk);
            }
        }
      r(i, ii) = s;
    }
  return r;
}

Tensor3 inverse(const Tensor3& f) {
  const Tensor3 h = cofactor(f);
  return transpose(h) * (1.0 / det(f));
}

IsochoricInvariants isochoric_invariants(const Tensor3& f) {
  const double j = det(f);
  require_positive_det(j);
  const Tensor3 c = transpose(f) * f;
  const Tensor3 cof_c = cofactor(c);
  const double j23 = std::cbrt(j * j);
  return {trace(c) / j23, trace(cof_c) / (j23 * j23)};
}

InvariantDerivatives invariant_derivatives(const Tensor3& f) {
  const double jac = det(f);
  require_positive_det(jac);

  const Tensor3 c = transpose(f) * f;
  const Tensor3 b = f * transpose(f);
  const Tensor3 g = transpose(inverse(f));  // F^{-T}
  const double i1 = trace(c);
  const double i2 = 0.5 * (i1 * i1 - ddot(c, c));
  const double s1 = 1.0 / std::cbrt(jac * jac);  // J^{-2/3}
  const double s2 = s1 * s1;                       // J^{-4/3}

  // dI2/dF = 2 (I1 F - F C)
  const Tensor3 e = 2.0 * (i1 * f - f * c);

  InvariantDerivatives out;
  out.d_i1 = s1 * (2.0 * f - (2.0 / 3.0) * i1 * g);
  out.d_i2 = s2 * (e - (4.0 / 3.0) * i2 * g);

  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t jj = 0; jj < 3; ++jj)
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = 0; l < 3; ++l) {
          const double dik = (i == k) ? 1.0 : 0.0;
          const double djl = (jj == l) ? 1.0 : 0.0;
          const double swap = g(i, l) * g(k, jj);
          const double gg = g(i, jj) * g(k, l);

          out.d2_i1(i, jj, k, l) =
              s1 * (2.0 * dik * djl - (4.0 / 3.0) * (f(i, jj) * g(k, l) + g(i, jj) * f(k, l)) +
                    (4.0 / 9.0) * i1 * gg + (2.0 / 3.0) * i1 * swap);

          const double de = 2.0 * (2.0 * f(i, jj) * f(k, l) + i1 * dik * djl - dik * c(l, jj) -
                                   f(i, l) * f(k, jj) - b(i, k) * djl);
          out.d2_i2(i, jj, k, l) =
              s2 * (de - (4.0 / 3.0) * (e(i, jj) * g(k, l) + g(i, jj) * e(k, l)) +
                    (16.0 / 9.0) * i2 * gg + (4.0 / 3.0) * i2 * swap);
        }
  return out;
}

Tensor3 principal_stretch_state(double l1, double l2) {
  require_stretch(l1);
  require_stretch(l2);
  return Tensor3::diag(l1, l2, 1.0 / (l1 * l2));
}

IsochoricInvariants uniaxial_invariants(double lambda) {
  require_stretch(lambda);
  return {lambda * lambda + 2.0 / lambda, 2.0 * lambda + 1.0 / (lambda * lambda)};
}

std::vector<Tensor3> generate_mode(const DeformationMode& mode) {
  std::vector<Tensor3> out;
  switch (mode.kind) {
    case ModeKind::UniaxialTension:
      for (double l : mode.stretches) {
        require_stretch(l);
        const double lat = 1.0 / std::sqrt(l);
        out.push_back(Tensor3::diag(l, lat, lat));
      }
      break;
    case ModeKind::EquibiaxialTension:
      for (double l : mode.stretches) {
        require_stretch(l);
        out.push_back(Tensor3::diag(l, l, 1.0 / (l * l)));
      }
      break;
    case ModeKind::PureShear:
      for (double l : mode.stretches) {
        require_stretch(l);
        out.push_back(Tensor3::diag(l, 1.0, 1.0 / l));
      }
      break;
    case ModeKind::SimpleShear:
      for (double gamma : mode.stretches) {
        if (!std::isfinite(gamma)) throw Error(ErrorCode::InvalidStretch, "shear amount must be finite");
        Tensor3 f = Tensor3::identity();
        f(0, 1) = gamma;
        out.push_back(f);
      }
      break;
    case ModeKind::PrincipalStretchGrid:
      for (double l1 : mode.stretches)
        for (double l2 : mode.stretches2) out.push_back(principal_stretch_state(l1, l2));
      break;
  }
  return out;
}

Vec3 principal_stretches(const Tensor3& f) {
  const Tensor3 c = transpose(f) * f;
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = c(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(m, Eigen::EigenvaluesOnly);
  const Eigen::Vector3d ev = solver.eigenvalues();
  return {std::sqrt(std::max(ev(0), 0.0)), std::sqrt(std::max(ev(1), 0.0)), std::sqrt(std::max(ev(2), 0.0))};
}

}  // namespace pann
