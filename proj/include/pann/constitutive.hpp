#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pann/kinematics.hpp"
#include "pann/network.hpp"
#include "pann/tensor.hpp"

namespace pann {

/// a G^3 + b G^2 + c G + d, coefficients stored as {a, b, c, d}.
struct Cubic {
  std::array<double, 4> coeffs{};

  [[nodiscard]] double operator()(double g) const noexcept;
  [[nodiscard]] double derivative(double g) const noexcept;
};

/// psi = c10(G)(I1-3) + c01(G)(I2-3) + c11(G)(I1-3)(I2-3)
///
/// G is recovered from the normalized parameter as param_min + t0 (param_max - param_min).
/// With an empty parameter vector G = param_min.
struct MooneyRivlinParametrized {
  Cubic c10;
  Cubic c01;
  Cubic c11;
  double param_min = 0.0;
  double param_max = 1.0;

  [[nodiscard]] double parameter(std::span<const double> t) const noexcept;
};

/// psi = c (I1bar - 3)
MooneyRivlinParametrized neo_hookean(double c);
/// psi = -c (I1bar - 3)
MooneyRivlinParametrized sign_flipped_neo_hookean(double c);
/// psi = c (I2bar - 3)
MooneyRivlinParametrized i2_only(double c);

/// Synthetic parametrized Mooney-Rivlin used for data generation:
///   c10 = 114.3 G^3 - 207.3 G^2 + 23.99 G - 1.143
///   c01 = 24 G - 0.8
///   c11 = 3 G
/// on G in [0.09, 0.11]. psi and the uniaxial stress both increase with G there.
MooneyRivlinParametrized default_mooney_rivlin_oracle();

struct MaterialLaw {
  std::variant<PotentialModel, MooneyRivlinParametrized> potential;
  std::string label;
};

/// Value and derivatives of psi in the invariants and parameters.
struct PotentialResponse {
  double value = 0.0;
  std::array<double, 2> coefficients{};  // d psi / d I1bar, d psi / d I2bar
  Matrix2 hessian;
  std::vector<double> d_params;
};

PotentialResponse evaluate_law(const MaterialLaw& law, const InvariantState& state);

std::array<double, 2> stress_coefficients(const MaterialLaw& law, const InvariantState& state);
Matrix2 invariant_hessian(const MaterialLaw& law, const InvariantState& state);

/// psi(I1bar(f), I2bar(f); t) - gamma (det f - 1); defined for any det f > 0.
double strain_energy(const MaterialLaw& law, const Tensor3& f, std::span<const double> t, double gamma = 0.0);

/// 2 (psi_1 + psi_2 / lambda)(lambda - lambda^-2) for incompressible uniaxial tension.
double uniaxial_stress(const MaterialLaw& law, double lambda, std::span<const double> t);

/// dW/dF - gamma J F^{-T}. Requires |det f - 1| <= 1e-10.
Tensor3 pk1_stress(const MaterialLaw& law, const Tensor3& f, std::span<const double> t, double gamma);

/// d^2 psi / dF dF through the invariants; the multiplier term is excluded.
Tensor4 pk1_tangent(const MaterialLaw& law, const Tensor3& f, std::span<const double> t);

/// Multiplier making the lateral stress P22 (= P33) of uniaxial tension vanish.
double uniaxial_lagrange_multiplier(const MaterialLaw& law, double lambda, std::span<const double> t);

/// CSV with header `lambda,P_model,P_data,t`. `data` is empty or matches `lambdas`;
/// an empty data column is written when absent. Multiple parameters are joined with ';'.
void write_curve_csv(const std::filesystem::path& path, const MaterialLaw& law, std::span<const double> lambdas,
                     std::span<const double> data, std::span<const double> t);

}  // namespace pann
