#include "hf/dynamics/cstr.hpp"

#include <cmath>

#include "hf/common/error.hpp"
#include "hf/dynamics/integrate.hpp"

namespace hf::dynamics {

namespace c = cstr;

CstrRateCoeffs cstr_rates(double t_r, const ScenarioParam& psi) {
  double t_abs = t_r + c::celsius_offset;
  if (!(t_abs > 0.0)) throw NumericalError("cstr_rates: absolute temperature must be positive");
  double inv_t = 1.0 / t_abs;
  CstrRateCoeffs k;
  k.k1 = psi.beta * c::k0_ab * std::exp(-c::theta_ab * inv_t);
  k.k2 = c::k0_bc * std::exp(-c::theta_bc * inv_t);
  k.k3 = c::k0_ad * std::exp(-psi.alpha * c::theta_ad * inv_t);
  return k;
}

void cstr_derivative(std::span<const double> x, std::span<const double> u,
                     const ScenarioParam& psi, std::span<double> dxdt) {
  if (x.size() != 4 || u.size() != 2 || dxdt.size() != 4)
    throw ShapeError("cstr_derivative: expected |x|=4, |u|=2, |dxdt|=4");
  double c_a = x[0], c_b = x[1], t_r = x[2], t_k = x[3];
  double flow = u[0], qdot = u[1];
  CstrRateCoeffs k = cstr_rates(t_r, psi);
  double r1 = k.k1 * c_a;
  double r2 = k.k2 * c_b;
  double r3 = k.k3 * c_a * c_a;
  dxdt[0] = flow * (c::c_A0 - c_a) - r1 - r3;
  dxdt[1] = -flow * c_b + r1 - r2;
  dxdt[2] = (r1 * c::h_ab + r2 * c::h_bc + r3 * c::h_ad) / (-c::rho * c::cp) +
            flow * (c::t_in - t_r) +
            c::k_w * c::area * (t_k - t_r) / (c::rho * c::cp * c::volume);
  dxdt[3] = (qdot + c::k_w * c::area * (t_r - t_k)) / (c::m_k * c::cp_k);
}

num::NodeId cstr_derivative_node(num::Tape& t, num::NodeId x, num::NodeId u,
                                 const ScenarioParam& psi) {
  using num::NodeId;
  NodeId c_a = t.slice(x, 0, 1);
  NodeId c_b = t.slice(x, 1, 1);
  NodeId t_r = t.slice(x, 2, 1);
  NodeId t_k = t.slice(x, 3, 1);
  NodeId flow = t.slice(u, 0, 1);
  NodeId qdot = t.slice(u, 1, 1);

  NodeId inv_t = t.reciprocal(t.affine(t_r, 1.0, c::celsius_offset));
  NodeId k1 = t.affine(t.exp(t.affine(inv_t, -c::theta_ab, 0.0)), psi.beta * c::k0_ab, 0.0);
  NodeId k2 = t.affine(t.exp(t.affine(inv_t, -c::theta_bc, 0.0)), c::k0_bc, 0.0);
  NodeId k3 = t.affine(t.exp(t.affine(inv_t, -psi.alpha * c::theta_ad, 0.0)), c::k0_ad, 0.0);
  NodeId r1 = t.mul(k1, c_a);
  NodeId r2 = t.mul(k2, c_b);
  NodeId r3 = t.mul(k3, t.square(c_a));

  NodeId dc_a = t.sub(t.mul(flow, t.affine(c_a, -1.0, c::c_A0)), t.add(r1, r3));
  NodeId dc_b = t.sub(t.sub(r1, r2), t.mul(flow, c_b));
  NodeId heat = t.add(t.add(t.affine(r1, c::h_ab, 0.0), t.affine(r2, c::h_bc, 0.0)),
                      t.affine(r3, c::h_ad, 0.0));
  NodeId dt_r = t.add(t.add(t.affine(heat, -1.0 / (c::rho * c::cp), 0.0),
                            t.mul(flow, t.affine(t_r, -1.0, c::t_in))),
                      t.affine(t.sub(t_k, t_r), c::k_w * c::area / (c::rho * c::cp * c::volume), 0.0));
  NodeId dt_k = t.affine(t.add(qdot, t.affine(t.sub(t_r, t_k), c::k_w * c::area, 0.0)),
                         1.0 / (c::m_k * c::cp_k), 0.0);
  return t.concat(t.concat(dc_a, dc_b), t.concat(dt_r, dt_k));
}

void CstrModel::step(std::span<const double> x, std::span<const double> u,
                     const ScenarioParam& psi, std::span<double> out) const {
  rk4_step(cstr_derivative, x, u, psi, sim_, out);
}

num::NodeId CstrModel::step_node(num::Tape& t, num::NodeId x, num::NodeId u,
                                 const ScenarioParam& psi) const {
  return rk4_step_node(t, cstr_derivative_node, x, u, psi, sim_);
}

void CstrModel::validate_scenario(const ScenarioParam& psi) const {
  if (!(std::isfinite(psi.alpha) && psi.alpha > 0.0) ||
      !(std::isfinite(psi.beta) && psi.beta > 0.0))
    throw ConfigError("CstrModel: scenario multipliers must be finite and positive");
}

}  // namespace hf::dynamics
