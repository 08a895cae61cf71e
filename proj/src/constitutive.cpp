#include "pann/constitutive.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <fstream>

#include "pann/error.hpp"

namespace pann {

namespace {

constexpr double kIsochoricTolerance = 1e-10;

void require_isochoric(const Tensor3& f) {
  const double j = det(f);
  if (!(std::abs(j - 1.0) <= kIsochoricTolerance)) {
    throw Error(ErrorCode::NotIsochoric, fmt::format("det F = {}", j));
  }
}

void require_stretch(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidStretch, fmt::format("lambda = {}", lambda));
  }
}

PotentialResponse evaluate_mooney_rivlin(const MooneyRivlinParametrized& mr, const InvariantState& state) {
  const double g = mr.parameter(state.t);
  const double y1 = state.i1_bar - 3.0;
  const double y2 = state.i2_bar - 3.0;
  const double c10 = mr.c10(g);
  const double c01 = mr.c01(g);
  const double c11 = mr.c11(g);

  PotentialResponse r;
  r.value = c10 * y1 + c01 * y2 + c11 * y1 * y2;
  r.coefficients = {c10 + c11 * y2, c01 + c11 * y1};
  r.hessian(0, 1) = c11;
  r.hessian(1, 0) = c11;
  r.d_params.assign(state.t.size(), 0.0);
  if (!state.t.empty()) {
    const double dg = mr.param_max - mr.param_min;
    r.d_params[0] = dg * (mr.c10.derivative(g) * y1 + mr.c01.derivative(g) * y2 + mr.c11.derivative(g) * y1 * y2);
  }
  return r;
}

InvariantState state_of(const Tensor3& f, std::span<const double> t) {
  const auto inv = isochoric_invariants(f);
  return {inv.i1_bar, inv.i2_bar, std::vector<double>(t.begin(), t.end())};
}

}  // namespace

double Cubic::operator()(double g) const noexcept {
  return ((coeffs[0] * g + coeffs[1]) * g + coeffs[2]) * g + coeffs[3];
}

double Cubic::derivative(double g) const noexcept { return (3.0 * coeffs[0] * g + 2.0 * coeffs[1]) * g + coeffs[2]; }

double MooneyRivlinParametrized::parameter(std::span<const double> t) const noexcept {
  if (t.empty()) return param_min;
  return param_min + t[0] * (param_max - param_min);
}

MooneyRivlinParametrized neo_hookean(double c) { return {{{0, 0, 0, c}}, {}, {}, 0.0, 1.0}; }

MooneyRivlinParametrized sign_flipped_neo_hookean(double c) { return neo_hookean(-c); }

MooneyRivlinParametrized i2_only(double c) { return {{}, {{0, 0, 0, c}}, {}, 0.0, 1.0}; }

MooneyRivlinParametrized default_mooney_rivlin_oracle() {
  return {{{114.3, -207.3, 23.99, -1.143}}, {{0, 0, 24.0, -0.8}}, {{0, 0, 3.0, 0.0}}, 0.09, 0.11};
}

PotentialResponse evaluate_law(const MaterialLaw& law, const InvariantState& state) {
  if (const auto* model = std::get_if<PotentialModel>(&law.potential)) {
    const auto d = evaluate_potential(*model, state, DerivativeOrder::Second);
    return {d.value, d.d_invariants, d.hessian, d.d_params};
  }
  return evaluate_mooney_rivlin(std::get<MooneyRivlinParametrized>(law.potential), state);
}

std::array<double, 2> stress_coefficients(const MaterialLaw& law, const InvariantState& state) {
  if (const auto* model = std::get_if<PotentialModel>(&law.potential)) return grad_invariants(*model, state);
  return evaluate_mooney_rivlin(std::get<MooneyRivlinParametrized>(law.potential), state).coefficients;
}

Matrix2 invariant_hessian(const MaterialLaw& law, const InvariantState& state) {
  return evaluate_law(law, state).hessian;
}

double strain_energy(const MaterialLaw& law, const Tensor3& f, std::span<const double> t, double gamma) {
  const auto state = state_of(f, t);
  double psi = 0.0;
  if (const auto* model = std::get_if<PotentialModel>(&law.potential)) {
    psi = forward(*model, state);
  } else {
    psi = evaluate_mooney_rivlin(std::get<MooneyRivlinParametrized>(law.potential), state).value;
  }
  return psi - gamma * (det(f) - 1.0);
}

double uniaxial_stress(const MaterialLaw& law, double lambda, std::span<const double> t) {
  require_stretch(lambda);
  const auto inv = uniaxial_invariants(lambda);
  const auto c = stress_coefficients(law, {inv.i1_bar, inv.i2_bar, std::vector<double>(t.begin(), t.end())});
  return 2.0 * (c[0] + c[1] / lambda) * (lambda - 1.0 / (lambda * lambda));
}

Tensor3 pk1_stress(const MaterialLaw& law, const Tensor3& f, std::span<const double> t, double gamma) {
  require_isochoric(f);
  const auto c = stress_coefficients(law, state_of(f, t));
  const auto d = invariant_derivatives(f);
  // J F^{-T} = cof F
  return c[0] * d.d_i1 + c[1] * d.d_i2 - gamma * cofactor(f);
}

Tensor4 pk1_tangent(const MaterialLaw& law, const Tensor3& f, std::span<const double> t) {
  require_isochoric(f);
  const auto r = evaluate_law(law, state_of(f, t));
  const auto d = invariant_derivatives(f);
  const Matrix2& h = r.hessian;

  Tensor4 a = dyad(d.d_i1, d.d_i1);
  a *= h(0, 0);
  Tensor4 cross = dyad(d.d_i1, d.d_i2);
  cross += dyad(d.d_i2, d.d_i1);
  cross *= h(0, 1);
  a += cross;
  Tensor4 t22 = dyad(d.d_i2, d.d_i2);
  t22 *= h(1, 1);
  a += t22;
  Tensor4 g1 = d.d2_i1;
  g1 *= r.coefficients[0];
  a += g1;
  Tensor4 g2 = d.d2_i2;
  g2 *= r.coefficients[1];
  a += g2;
  return a;
}

double uniaxial_lagrange_multiplier(const MaterialLaw& law, double lambda, std::span<const double> t) {
  require_stretch(lambda);
  const Tensor3 f = generate_mode({ModeKind::UniaxialTension, {lambda}, {}}).front();
  const auto c = stress_coefficients(law, state_of(f, t));
  const auto d = invariant_derivatives(f);
  // P22 = psi_a dIa_22 - gamma cof(F)_22 = 0 with cof(F)_22 = 1 / F_22
  return (c[0] * d.d_i1(1, 1) + c[1] * d.d_i2(1, 1)) * f(1, 1);
}

void write_curve_csv(const std::filesystem::path& path, const MaterialLaw& law, std::span<const double> lambdas,
                     std::span<const double> data, std::span<const double> t) {
  if (!data.empty() && data.size() != lambdas.size()) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("{} data values for {} stretches", data.size(), lambdas.size()));
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write {}", path.string()));
  const std::string t_field = fmt::format("{}", fmt::join(t, ";"));
  out << "lambda,P_model,P_data,t\n";
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    out << fmt::format("{},{},", lambdas[i], uniaxial_stress(law, lambdas[i], t));
    if (!data.empty()) out << fmt::format("{}", data[i]);
    out << ',' << t_field << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, fmt::format("write failed for {}", path.string()));
}

}  // namespace pann
