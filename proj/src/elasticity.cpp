#include "smoothcontact/elasticity.hpp"

#include <cmath>

#include "smoothcontact/dual.hpp"
#include "smoothcontact/solver.hpp"

namespace smoothcontact {

DeformableBody::DeformableBody(TriMesh2D rest, Material material, std::vector<int> fixed_vertices)
    : rest_(std::move(rest)), material_(material), fixed_(std::move(fixed_vertices)) {
  material_.validate();
  rest_.validate();
  for (int v : fixed_)
    if (v < 0 || v >= vertex_count()) throw ConfigError("pinned vertex out of range");
  dm_inv_.reserve(rest_.triangles.size());
  rest_area_.reserve(rest_.triangles.size());
  for (size_t t = 0; t < rest_.triangles.size(); ++t) {
    const auto& tri = rest_.triangles[t];
    Eigen::Matrix2d dm;
    dm.col(0) = rest_.vertices[tri[1]] - rest_.vertices[tri[0]];
    dm.col(1) = rest_.vertices[tri[2]] - rest_.vertices[tri[0]];
    dm_inv_.push_back(dm.inverse());
    rest_area_.push_back(rest_.signed_area(static_cast<int>(t)));
  }
  boundary_loop_ = rest_.boundary_loop();
}

Eigen::VectorXd DeformableBody::rest_positions() const {
  Eigen::VectorXd x(dof_count());
  for (int v = 0; v < vertex_count(); ++v) {
    x[2 * v] = rest_.vertices[v].x();
    x[2 * v + 1] = rest_.vertices[v].y();
  }
  return x;
}

Eigen::VectorXd DeformableBody::lumped_mass() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(dof_count());
  for (size_t t = 0; t < rest_.triangles.size(); ++t) {
    const double share = material_.density * rest_area_[t] / 3.0;
    for (int v : rest_.triangles[t]) {
      m[2 * v] += share;
      m[2 * v + 1] += share;
    }
  }
  return m;
}

double DeformableBody::total_mass() const { return material_.density * rest_.total_area(); }

namespace {

template <class T>
T neo_hookean_element(const V2<T>& x0, const V2<T>& x1, const V2<T>& x2,
                      const Eigen::Matrix2d& dm_inv, double area, double mu, double lambda) {
  using std::log;
  const V2<T> d1 = x1 - x0;
  const V2<T> d2 = x2 - x0;
  // F = Ds * Dm_inv with Ds = [d1 d2]
  const T f00 = d1.x * dm_inv(0, 0) + d2.x * dm_inv(1, 0);
  const T f01 = d1.x * dm_inv(0, 1) + d2.x * dm_inv(1, 1);
  const T f10 = d1.y * dm_inv(0, 0) + d2.y * dm_inv(1, 0);
  const T f11 = d1.y * dm_inv(0, 1) + d2.y * dm_inv(1, 1);
  const T i1 = f00 * f00 + f01 * f01 + f10 * f10 + f11 * f11;
  const T det = f00 * f11 - f01 * f10;
  const T ln_j = log(det);
  return area * (0.5 * mu * (i1 - 2.0) - mu * ln_j + 0.5 * lambda * (ln_j * ln_j));
}

double element_det(const DeformableBody& body, const Eigen::VectorXd& x, size_t t,
                   const Eigen::Matrix2d& dm_inv) {
  const auto& tri = body.rest().triangles[t];
  Eigen::Matrix2d ds;
  ds.col(0) = Eigen::Vector2d(x[2 * tri[1]] - x[2 * tri[0]], x[2 * tri[1] + 1] - x[2 * tri[0] + 1]);
  ds.col(1) = Eigen::Vector2d(x[2 * tri[2]] - x[2 * tri[0]], x[2 * tri[2] + 1] - x[2 * tri[0] + 1]);
  return (ds * dm_inv).determinant();
}

template <class T, bool Derivs>
double neo_hookean_core(const DeformableBody& body, const Eigen::VectorXd& x,
                        const std::vector<Eigen::Matrix2d>& dm_inv,
                        const std::vector<double>& rest_area, Eigen::VectorXd* grad,
                        std::vector<Eigen::Triplet<double>>* trips) {
  if (x.size() != body.dof_count()) throw ConfigError("position vector size mismatch");
  const double mu = body.material().mu();
  const double lambda = body.material().lambda();
  double total = 0.0;
  for (size_t t = 0; t < body.rest().triangles.size(); ++t) {
    if (element_det(body, x, t, dm_inv[t]) <= 0.0) throw InfeasibleError("element inversion");
    const auto& tri = body.rest().triangles[t];
    constexpr int nvars = 6;
    V2<T> p[3];
    for (int k = 0; k < 3; ++k)
      p[k] = {AdTraits<T>::variable(nvars, 2 * k, x[2 * tri[k]]),
              AdTraits<T>::variable(nvars, 2 * k + 1, x[2 * tri[k] + 1])};
    const T e = neo_hookean_element(p[0], p[1], p[2], dm_inv[t], rest_area[t], mu, lambda);
    total += AdTraits<T>::value(e);
    if constexpr (Derivs) {
      int map[nvars];
      for (int k = 0; k < 3; ++k) {
        map[2 * k] = 2 * tri[k];
        map[2 * k + 1] = 2 * tri[k] + 1;
      }
      for (int i = 0; i < nvars; ++i) (*grad)[map[i]] += e.g[i];
      for (int i = 0; i < nvars; ++i)
        for (int j = 0; j < nvars; ++j)
          if (e.H(i, j) != 0.0) trips->emplace_back(map[i], map[j], e.H(i, j));
    }
  }
  return total;
}

}  // namespace

EnergyDerivatives neo_hookean_energy(const DeformableBody& body, const Eigen::VectorXd& positions) {
  EnergyDerivatives ed;
  ed.gradient = Eigen::VectorXd::Zero(body.dof_count());
  std::vector<Eigen::Triplet<double>> trips;
  ed.value = neo_hookean_core<D2, true>(body, positions, body.dm_inv_, body.rest_area_,
                                        &ed.gradient, &trips);
  ed.hessian.resize(body.dof_count(), body.dof_count());
  ed.hessian.setFromTriplets(trips.begin(), trips.end());
  return ed;
}

double neo_hookean_value(const DeformableBody& body, const Eigen::VectorXd& positions) {
  return neo_hookean_core<double, false>(body, positions, body.dm_inv_, body.rest_area_, nullptr,
                                         nullptr);
}

int World::dof_offset(int body) const {
  int off = 0;
  for (int b = 0; b < body; ++b) off += bodies[b].dof_count();
  return off;
}

int World::total_dofs() const { return dof_offset(static_cast<int>(bodies.size())); }

Eigen::VectorXd World::stacked_rest_positions() const {
  Eigen::VectorXd x(total_dofs());
  for (size_t b = 0; b < bodies.size(); ++b)
    x.segment(dof_offset(static_cast<int>(b)), bodies[b].dof_count()) = bodies[b].rest_positions();
  return x;
}

Eigen::VectorXd World::stacked_lumped_mass() const {
  Eigen::VectorXd m(total_dofs());
  for (size_t b = 0; b < bodies.size(); ++b)
    m.segment(dof_offset(static_cast<int>(b)), bodies[b].dof_count()) = bodies[b].lumped_mass();
  return m;
}

std::vector<int> World::fixed_dofs() const {
  std::vector<int> fixed;
  for (size_t b = 0; b < bodies.size(); ++b) {
    const int off = dof_offset(static_cast<int>(b));
    for (int v : bodies[b].fixed_vertices()) {
      fixed.push_back(off + 2 * v);
      fixed.push_back(off + 2 * v + 1);
    }
  }
  return fixed;
}

DofMap::DofMap(int total_dofs, const std::vector<int>& fixed_dofs)
    : full_to_free_(total_dofs, 0) {
  for (int d : fixed_dofs) full_to_free_[d] = -1;
  for (int d = 0; d < total_dofs; ++d) {
    if (full_to_free_[d] == 0) {
      full_to_free_[d] = static_cast<int>(free_to_full_.size());
      free_to_full_.push_back(d);
    }
  }
}

Eigen::VectorXd DofMap::restrict_to_free(const Eigen::VectorXd& full) const {
  Eigen::VectorXd u(free_count());
  for (int i = 0; i < free_count(); ++i) u[i] = full[free_to_full_[i]];
  return u;
}

Eigen::VectorXd DofMap::expand(const Eigen::VectorXd& free, const Eigen::VectorXd& reference) const {
  Eigen::VectorXd full = reference;
  for (int i = 0; i < free_count(); ++i) full[free_to_full_[i]] = free[i];
  return full;
}

IncrementalPotential::IncrementalPotential(const World& world, const SimState& state)
    : world_(world), dofs_(world.total_dofs(), world.fixed_dofs()) {
  if (world_.h <= 0) throw ConfigError("time step must be positive");
  if (state.positions.size() != world_.total_dofs() ||
      state.velocities.size() != world_.total_dofs())
    throw ConfigError("state size mismatch");
  mass_ = world_.stacked_lumped_mass();
  x_t_ = state.positions;
  inertia_ = state.positions + world_.h * state.velocities;
}

Eigen::VectorXd IncrementalPotential::full_positions(const Eigen::VectorXd& free) const {
  return dofs_.expand(free, x_t_);
}

template <bool Derivs>
double IncrementalPotential::contact_terms(const Eigen::VectorXd& full, Eigen::VectorXd* grad,
                                           std::vector<Eigen::Triplet<double>>* trips) const {
  if (!world_.contact_enabled) return 0.0;
  const int nb = static_cast<int>(world_.bodies.size());
  if (nb == 0) return 0.0;

  std::vector<Polyline> boundary(nb);
  for (int b = 0; b < nb; ++b) {
    const Eigen::VectorXd body_x = full.segment(world_.dof_offset(b), world_.bodies[b].dof_count());
    boundary[b] = boundary_polyline_at(world_.bodies[b].boundary_loop(), body_x);
  }
  // Global dof of a local contact coordinate: probe part -> body i boundary
  // vertices, surface part -> body j vertices (or -1 for rigid obstacles).
  auto probe_dof = [&](int body, int coord) {
    const auto& loop = world_.bodies[body].boundary_loop();
    return world_.dof_offset(body) + 2 * loop[coord / 2] + coord % 2;
  };

  double total = 0.0;
  auto accumulate = [&](int body_i, const Polyline& surface, int body_j /* -1 = obstacle */) {
    const std::vector<Vec2>& probes = boundary[body_i].vertices;
    if constexpr (!Derivs) {
      total += contact_value(probes, surface, world_.contact);
      return;
    } else {
      const EnergyDerivatives ed = contact_energy(probes, surface, world_.contact);
      total += ed.value;
      const int np2 = 2 * static_cast<int>(probes.size());
      auto to_global = [&](int c) -> int {
        if (c < np2) return probe_dof(body_i, c);
        if (body_j < 0) return -1;
        const auto& loop = world_.bodies[body_j].boundary_loop();
        const int cc = c - np2;
        return world_.dof_offset(body_j) + 2 * loop[cc / 2] + cc % 2;
      };
      for (int c = 0; c < ed.gradient.size(); ++c) {
        const int g = to_global(c);
        if (g >= 0) (*grad)[g] += ed.gradient[c];
      }
      for (int c = 0; c < ed.hessian.outerSize(); ++c) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(ed.hessian, c); it; ++it) {
          const int r = to_global(static_cast<int>(it.row()));
          const int cl = to_global(static_cast<int>(it.col()));
          if (r >= 0 && cl >= 0) trips->emplace_back(r, cl, it.value());
        }
      }
    }
  };

  for (int i = 0; i < nb; ++i) {
    for (int j = 0; j < nb; ++j)
      if (i != j) accumulate(i, boundary[j], j);
    for (const Polyline& obstacle : world_.obstacles) accumulate(i, obstacle, -1);
  }
  return total;
}

double IncrementalPotential::value(const Eigen::VectorXd& free) const {
  const Eigen::VectorXd x = full_positions(free);
  const double h2 = world_.h * world_.h;
  double e = (0.5 * x.dot(mass_.cwiseProduct(x)) - x.dot(mass_.cwiseProduct(inertia_))) / h2;
  for (size_t b = 0; b < world_.bodies.size(); ++b)
    e += neo_hookean_value(world_.bodies[b],
                           x.segment(world_.dof_offset(static_cast<int>(b)),
                                     world_.bodies[b].dof_count()));
  if (world_.f_ext.size() > 0) e += x.dot(world_.f_ext);
  e += contact_terms<false>(x, nullptr, nullptr);
  return e;
}

EnergyDerivatives IncrementalPotential::derivatives(const Eigen::VectorXd& free) const {
  const Eigen::VectorXd x = full_positions(free);
  const int n = world_.total_dofs();
  const double h2 = world_.h * world_.h;

  double value = (0.5 * x.dot(mass_.cwiseProduct(x)) - x.dot(mass_.cwiseProduct(inertia_))) / h2;
  Eigen::VectorXd grad = mass_.cwiseProduct(x - inertia_) / h2;
  std::vector<Eigen::Triplet<double>> trips;
  for (int d = 0; d < n; ++d) trips.emplace_back(d, d, mass_[d] / h2);

  for (size_t b = 0; b < world_.bodies.size(); ++b) {
    const int off = world_.dof_offset(static_cast<int>(b));
    const int nd = world_.bodies[b].dof_count();
    const EnergyDerivatives ed = neo_hookean_energy(world_.bodies[b], x.segment(off, nd));
    value += ed.value;
    grad.segment(off, nd) += ed.gradient;
    for (int c = 0; c < ed.hessian.outerSize(); ++c)
      for (Eigen::SparseMatrix<double>::InnerIterator it(ed.hessian, c); it; ++it)
        trips.emplace_back(off + static_cast<int>(it.row()), off + static_cast<int>(it.col()),
                           it.value());
  }
  if (world_.f_ext.size() > 0) {
    value += x.dot(world_.f_ext);
    grad += world_.f_ext;
  }
  value += contact_terms<true>(x, &grad, &trips);

  // Restrict to free dofs.
  EnergyDerivatives out;
  out.value = value;
  out.gradient = Eigen::VectorXd::Zero(dofs_.free_count());
  for (int i = 0; i < dofs_.free_count(); ++i) out.gradient[i] = grad[dofs_.free_to_full()[i]];
  std::vector<Eigen::Triplet<double>> free_trips;
  free_trips.reserve(trips.size());
  for (const auto& t : trips) {
    const int r = dofs_.full_to_free_[t.row()];
    const int c = dofs_.full_to_free_[t.col()];
    if (r >= 0 && c >= 0) free_trips.emplace_back(r, c, t.value());
  }
  out.hessian.resize(dofs_.free_count(), dofs_.free_count());
  out.hessian.setFromTriplets(free_trips.begin(), free_trips.end());
  return out;
}

namespace {
class StepObjective : public ObjectiveBase {
 public:
  explicit StepObjective(const IncrementalPotential& ip) : ip_(ip) {}
  double value(const Eigen::VectorXd& x) const override { return ip_.value(x); }
  EnergyDerivatives derivatives(const Eigen::VectorXd& x) const override {
    return ip_.derivatives(x);
  }

 private:
  const IncrementalPotential& ip_;
};
}  // namespace

StepResult step(const World& world, const SimState& state, const SolverConfig& config) {
  const IncrementalPotential ip(world, state);
  const StepObjective objective(ip);
  const Eigen::VectorXd x0 = ip.dofs().restrict_to_free(state.positions);
  const NewtonResult res = newton_minimize(objective, x0, config);
  StepResult out;
  out.state.positions = ip.full_positions(res.x);
  out.state.velocities = (out.state.positions - state.positions) / world.h;
  out.state.time = state.time + world.h;
  out.newton_iterations = res.stats.iterations;
  out.converged = res.stats.converged;
  return out;
}

}  // namespace smoothcontact
