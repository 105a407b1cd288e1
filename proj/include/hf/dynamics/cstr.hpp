#pragma once

#include <array>
#include <span>

#include "hf/dynamics/model.hpp"
#include "hf/dynamics/scenario.hpp"

namespace hf::dynamics {

// Exothermic CSTR with reaction scheme A -> B -> C and side reaction 2A -> D.
// State [c_A, c_B, T_R, T_K]: concentrations in mol/l, reactor and coolant
// temperatures in degrees C.  Action [F, Qdot]: normalized inflow in 1/h and
// coolant heat removal in kJ/h.
namespace cstr {

inline constexpr double k0_ab = 1.287e12;   // 1/h
inline constexpr double k0_bc = 1.287e12;   // 1/h
inline constexpr double k0_ad = 9.043e9;    // l/(mol h)
inline constexpr double theta_ab = 9758.3;  // K
inline constexpr double theta_bc = 9758.3;  // K
inline constexpr double theta_ad = 8560.0;  // K
inline constexpr double c_A0 = 5.1;         // mol/l
inline constexpr double rho = 0.9342;       // kg/l
inline constexpr double cp = 3.01;          // kJ/(kg K)
inline constexpr double cp_k = 2.0;         // kJ/(kg K)
inline constexpr double area = 0.215;       // m^2
inline constexpr double volume = 10.01;     // l
inline constexpr double m_k = 5.0;          // kg
inline constexpr double t_in = 130.0;       // C
inline constexpr double k_w = 4032.0;       // kJ/(h m^2 K)
inline constexpr double h_ab = 4.2;         // kJ/mol
inline constexpr double h_bc = -11.0;       // kJ/mol
inline constexpr double h_ad = -41.85;      // kJ/mol

inline constexpr double celsius_offset = 273.15;

}  // namespace cstr

struct CstrState {
  double c_a = 0.0;
  double c_b = 0.0;
  double t_r = 0.0;
  double t_k = 0.0;
};

struct CstrAction {
  double flow = 0.0;
  double qdot = 0.0;
};

struct CstrRateCoeffs {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
};

// Arrhenius rate coefficients at reactor temperature T_R (deg C) under the
// scenario multipliers: beta scales k1, alpha scales the activation term
// of k3.
CstrRateCoeffs cstr_rates(double t_r, const ScenarioParam& psi);

// Right-hand side of the four CSTR ODEs.  x = [c_A, c_B, T_R, T_K],
// u = [F, Qdot], dxdt receives [dc_A, dc_B, dT_R, dT_K] per hour.
void cstr_derivative(std::span<const double> x, std::span<const double> u,
                     const ScenarioParam& psi, std::span<double> dxdt);

// Graph-side copy of cstr_derivative; x and u are 4- and 2-element column
// nodes, the result is a 4-element node.
num::NodeId cstr_derivative_node(num::Tape& t, num::NodeId x, num::NodeId u,
                                 const ScenarioParam& psi);

class CstrModel final : public DynamicsModel {
 public:
  explicit CstrModel(SimConfig sim = SimConfig{}) : sim_(sim) {}

  int state_dim() const override { return 4; }
  int action_dim() const override { return 2; }
  const SimConfig& sim() const { return sim_; }

  void step(std::span<const double> x, std::span<const double> u,
            const ScenarioParam& psi, std::span<double> out) const override;

  num::NodeId step_node(num::Tape& t, num::NodeId x, num::NodeId u,
                        const ScenarioParam& psi) const override;

  void validate_scenario(const ScenarioParam& psi) const override;

 private:
  SimConfig sim_;
};

}  // namespace hf::dynamics
