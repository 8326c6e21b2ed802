#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "smoothcontact/geometry.hpp"

namespace smoothcontact {

struct BarrierParams {
  double d_hat = 0.02;  // activation distance [m]
  double kappa = 1.0;   // barrier stiffness [J]
  void validate() const {
    if (d_hat <= 0 || kappa <= 0) throw ConfigError("barrier parameters must be positive");
  }
};

struct ImlsParams {
  double R = 1.0;        // kernel support radius [m]
  double sigma_r = 0.5;  // residual re-weighting width
  double sigma_n = 1.0;  // normal re-weighting width
  int irls_iters = 1;    // 0 = plain IMLS
  void validate() const {
    if (R <= 0 || sigma_r <= 0 || sigma_n <= 0 || irls_iters < 0)
      throw ConfigError("invalid IMLS parameters");
  }
};

enum class ContactKind { NTS, IPC, IMLS };

const char* to_string(ContactKind kind);
ContactKind contact_kind_from_string(const std::string& s);

struct ContactFormulation {
  ContactKind kind = ContactKind::IPC;
  BarrierParams barrier;
  ImlsParams imls;  // used when kind == IMLS
  void validate() const {
    barrier.validate();
    if (kind == ContactKind::IMLS) {
      imls.validate();
      // Guarantees that an empty IMLS support implies distance > d_hat.
      if (imls.R < 2.0 * barrier.d_hat) throw ConfigError("IMLS requires R >= 2*d_hat");
    }
  }
};

// Value, gradient and sparse symmetric Hessian of an energy with respect to a
// stacked coordinate vector.
struct EnergyDerivatives {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::SparseMatrix<double> hessian;
};

// Clamped log barrier phi(g) = -(g - d_hat)^2 ln(g / d_hat) on (0, d_hat),
// 0 for g >= d_hat. barrier() returns kappa * phi(g) and throws
// InfeasibleError("penetration") for g <= 0.
double barrier(double g, const BarrierParams& params);
double barrier_grad(double g, const BarrierParams& params);
double barrier_hess(double g, const BarrierParams& params);

struct NtsGap {
  double gap;    // signed: + on the outward-normal side, magnitude = segment distance
  int segment;   // globally closest segment, ties to the lowest index
  Vec2 closest;  // clamped closest point
};

// Node-to-segment gap: closest segment by point-segment distance, signed by
// the segment's outward side.
NtsGap gap_nts(const Vec2& p, const Polyline& poly);

// Coordinate layout of the contact energies below:
//   [probe_0.x, probe_0.y, ..., poly_vertex_0.x, poly_vertex_0.y, ...]
EnergyDerivatives energy_nts(const std::vector<Vec2>& probes, const Polyline& poly,
                             const BarrierParams& params);
EnergyDerivatives energy_ipc(const std::vector<Vec2>& probes, const Polyline& poly,
                             const BarrierParams& params);
EnergyDerivatives energy_imls(const std::vector<Vec2>& probes, const Polyline& poly,
                              const BarrierParams& params, const ImlsParams& imls);

EnergyDerivatives contact_energy(const std::vector<Vec2>& probes, const Polyline& poly,
                                 const ContactFormulation& formulation);
// Value-only path (used by line searches); throws InfeasibleError like the
// derivative path.
double contact_value(const std::vector<Vec2>& probes, const Polyline& poly,
                     const ContactFormulation& formulation);

// Robust IMLS signed distance at a query point. Uses the polyline's stored
// normals; irls_iters re-weighting passes starting from the plain IMLS value.
// grad_x is the spatial gradient with the final weights frozen.
struct ImlsEval {
  double psi;
  Vec2 grad_x;
  std::vector<int> support;        // sample vertex indices, ascending
  Eigen::VectorXd sample_weights;  // final frozen IRLS weights per support sample
};
ImlsEval imls_value(const Vec2& x, const Polyline& poly, const ImlsParams& params);

// Test hook: IMLS contact energy value with support sets and IRLS weights
// frozen at a reference configuration (one entry per probe; probes outside the
// barrier window at the reference carry an empty support). This is the
// function the analytic gradient of energy_imls differentiates.
struct FrozenImlsProbe {
  std::vector<int> support;
  Eigen::VectorXd weights;
};
std::vector<FrozenImlsProbe> imls_freeze(const std::vector<Vec2>& probes, const Polyline& poly,
                                         const BarrierParams& params, const ImlsParams& imls);
double energy_imls_value_frozen(const std::vector<Vec2>& probes, const Polyline& poly,
                                const BarrierParams& params, const ImlsParams& imls,
                                const std::vector<FrozenImlsProbe>& frozen);

// Sum of the chosen formulation over all ordered body pairs (i, j), i != j:
// vertices of body i probed against the surface of body j. Coordinates are the
// concatenated body vertex positions.
EnergyDerivatives pairwise_contact(const std::vector<Polyline>& bodies,
                                   const ContactFormulation& formulation);
double pairwise_contact_value(const std::vector<Polyline>& bodies,
                              const ContactFormulation& formulation);

}  // namespace smoothcontact
