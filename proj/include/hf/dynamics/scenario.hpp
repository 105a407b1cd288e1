#pragma once

namespace hf::dynamics {

// Uncertainty realization passed to every model step. Field meaning is
// model-specific: the CSTR uses alpha/beta multipliers; linear toy models use
// shift as an additive state disturbance.
struct ScenarioParam {
  double alpha = 1.0;  // CSTR: activation-energy multiplier for the A->D reaction
  double beta = 1.0;   // CSTR: rate-coefficient multiplier for the A->B reaction
  double shift = 0.0;  // linear/toy models: additive per-step state offset

  static ScenarioParam nominal() { return {}; }
  static ScenarioParam cstr(double a, double b) { return {a, b, 0.0}; }
  static ScenarioParam shifted(double s) { return {1.0, 1.0, s}; }
};

struct SimConfig {
  double dt = 0.005;  // hours for the CSTR
  int substeps = 4;
};

}  // namespace hf::dynamics
