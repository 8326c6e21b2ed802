#include "smoothcontact/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "smoothcontact/dual.hpp"

namespace smoothcontact {

const char* to_string(ContactKind kind) {
  switch (kind) {
    case ContactKind::NTS: return "NTS";
    case ContactKind::IPC: return "IPC";
    case ContactKind::IMLS: return "IMLS";
  }
  return "?";
}

ContactKind contact_kind_from_string(const std::string& s) {
  if (s == "NTS") return ContactKind::NTS;
  if (s == "IPC") return ContactKind::IPC;
  if (s == "IMLS") return ContactKind::IMLS;
  throw ConfigError("unknown contact formulation '" + s + "'");
}

namespace {

template <class T>
T barrier_phi(const T& g, double d_hat) {
  using std::log;
  const T diff = g - d_hat;
  return -(diff * diff) * log(g * (1.0 / d_hat));
}

double phi_value(double g, double d_hat) { return barrier_phi(g, d_hat); }

struct Assembler {
  int dim;
  double value = 0.0;
  Eigen::VectorXd grad;
  std::vector<Eigen::Triplet<double>> trips;

  explicit Assembler(int d) : dim(d), grad(Eigen::VectorXd::Zero(d)) {}

  void add(const D2& e, const std::vector<int>& map) {
    value += e.v;
    const int n = e.size();
    for (int i = 0; i < n; ++i) grad[map[i]] += e.g[i];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (e.H(i, j) != 0.0) trips.emplace_back(map[i], map[j], e.H(i, j));
  }

  EnergyDerivatives finish() const {
    EnergyDerivatives ed;
    ed.value = value;
    ed.gradient = grad;
    ed.hessian.resize(dim, dim);
    ed.hessian.setFromTriplets(trips.begin(), trips.end());
    return ed;
  }
};

template <class T>
V2<T> make_point(int nvars, int base, const Vec2& p) {
  return {AdTraits<T>::variable(nvars, base, p.x()), AdTraits<T>::variable(nvars, base + 1, p.y())};
}

template <class T>
V2<T> make_const_point(int nvars, const Vec2& p) {
  return {AdTraits<T>::constant(nvars, p.x()), AdTraits<T>::constant(nvars, p.y())};
}

// ---------------------------------------------------------------------------
// NTS
// ---------------------------------------------------------------------------

enum class DistBranch { Interior, EndA, EndB };

DistBranch classify(double bary) {
  if (bary <= 0.0) return DistBranch::EndA;
  if (bary >= 1.0) return DistBranch::EndB;
  return DistBranch::Interior;
}

// Signed node-to-segment gap: magnitude = clamped segment distance, sign from
// the outward side of the segment line. The branch and sign are frozen from
// the double evaluation.
template <class T>
T nts_gap_element(const V2<T>& p, const V2<T>& a, const V2<T>& b, DistBranch branch, double sign) {
  if (branch == DistBranch::EndA) return sign * (p - a).norm();
  if (branch == DistBranch::EndB) return sign * (p - b).norm();
  const V2<T> e = b - a;
  // outward-normal component: n_hat . (p - a) = -cross(e, p - a) / |e|
  return -cross2(e, p - a) / e.norm();
}

}  // namespace

double barrier(double g, const BarrierParams& params) {
  if (g <= 0.0) throw InfeasibleError("penetration");
  if (g >= params.d_hat) return 0.0;
  return params.kappa * phi_value(g, params.d_hat);
}

double barrier_grad(double g, const BarrierParams& params) {
  if (g <= 0.0) throw InfeasibleError("penetration");
  const double d = params.d_hat;
  if (g >= d) return 0.0;
  return params.kappa * (-2.0 * (g - d) * std::log(g / d) - (g - d) * (g - d) / g);
}

double barrier_hess(double g, const BarrierParams& params) {
  if (g <= 0.0) throw InfeasibleError("penetration");
  const double d = params.d_hat;
  if (g >= d) return 0.0;
  return params.kappa *
         (-2.0 * std::log(g / d) - 4.0 * (g - d) / g + (g - d) * (g - d) / (g * g));
}

NtsGap gap_nts(const Vec2& p, const Polyline& poly) {
  if (poly.segment_count() < 1) throw GeometryError("polyline has no segments");
  double best = std::numeric_limits<double>::infinity();
  int best_seg = -1;
  PointSegmentResult best_res{};
  for (int s = 0; s < poly.segment_count(); ++s) {
    const auto [ia, ib] = poly.segment(s);
    const PointSegmentResult r = point_segment_distance(p, poly.vertices[ia], poly.vertices[ib]);
    if (r.distance < best) {
      best = r.distance;
      best_seg = s;
      best_res = r;
    }
  }
  const auto [ia, ib] = poly.segment(best_seg);
  const Vec2 e = poly.vertices[ib] - poly.vertices[ia];
  const Vec2 n(e.y(), -e.x());
  const double side = n.dot(p - poly.vertices[ia]);
  const double sign = side >= 0.0 ? 1.0 : -1.0;
  return {sign * best, best_seg, best_res.closest};
}

namespace {

template <class T, bool Derivs>
double nts_core(const std::vector<Vec2>& probes, const Polyline& poly,
                const BarrierParams& params, Assembler* out) {
  params.validate();
  poly.validate();
  const int np = static_cast<int>(probes.size());
  const int poly_base = 2 * np;
  double total = 0.0;
  for (int k = 0; k < np; ++k) {
    const NtsGap ng = gap_nts(probes[k], poly);
    if (std::abs(ng.gap) >= params.d_hat) continue;
    if (ng.gap <= 0.0) throw InfeasibleError("penetration");
    const auto [ia, ib] = poly.segment(ng.segment);
    const PointSegmentResult psr =
        point_segment_distance(probes[k], poly.vertices[ia], poly.vertices[ib]);
    const DistBranch branch = classify(psr.bary);
    constexpr int nvars = 6;
    const V2<T> p = make_point<T>(nvars, 0, probes[k]);
    const V2<T> a = make_point<T>(nvars, 2, poly.vertices[ia]);
    const V2<T> b = make_point<T>(nvars, 4, poly.vertices[ib]);
    const T g = nts_gap_element(p, a, b, branch, ng.gap >= 0 ? 1.0 : -1.0);
    const T e = params.kappa * barrier_phi(g, params.d_hat);
    total += AdTraits<T>::value(e);
    if constexpr (Derivs) {
      const std::vector<int> map = {2 * k,          2 * k + 1,          poly_base + 2 * ia,
                                    poly_base + 2 * ia + 1, poly_base + 2 * ib, poly_base + 2 * ib + 1};
      out->add(e, map);
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// IPC
// ---------------------------------------------------------------------------

template <class T>
T segment_distance_element(const V2<T>& p, const V2<T>& a, const V2<T>& b, DistBranch branch,
                           double sign) {
  if (branch == DistBranch::EndA) return (p - a).norm();
  if (branch == DistBranch::EndB) return (p - b).norm();
  const V2<T> e = b - a;
  return sign * cross2(e, p - a) / e.norm();
}

template <class T, bool Derivs>
double ipc_core(const std::vector<Vec2>& probes, const Polyline& poly,
                const BarrierParams& params, Assembler* out) {
  params.validate();
  poly.validate();
  const int np = static_cast<int>(probes.size());
  const int poly_base = 2 * np;
  double total = 0.0;
  for (int k = 0; k < np; ++k) {
    const Vec2& pr = probes[k];
    // vertex-segment pairs
    for (int s = 0; s < poly.segment_count(); ++s) {
      const auto [ia, ib] = poly.segment(s);
      const PointSegmentResult r = point_segment_distance(pr, poly.vertices[ia], poly.vertices[ib]);
      if (r.distance >= params.d_hat) continue;
      if (r.distance <= 0.0) throw InfeasibleError("penetration");
      const DistBranch branch = classify(r.bary);
      double sign = 1.0;
      if (branch == DistBranch::Interior) {
        const Vec2 e = poly.vertices[ib] - poly.vertices[ia];
        const Vec2 d = pr - poly.vertices[ia];
        sign = (e.x() * d.y() - e.y() * d.x()) >= 0 ? 1.0 : -1.0;
      }
      constexpr int nvars = 6;
      const V2<T> p = make_point<T>(nvars, 0, pr);
      const V2<T> a = make_point<T>(nvars, 2, poly.vertices[ia]);
      const V2<T> b = make_point<T>(nvars, 4, poly.vertices[ib]);
      const T dist = segment_distance_element(p, a, b, branch, sign);
      const T e = params.kappa * barrier_phi(dist, params.d_hat);
      total += AdTraits<T>::value(e);
      if constexpr (Derivs) {
        const std::vector<int> map = {2 * k,
                                      2 * k + 1,
                                      poly_base + 2 * ia,
                                      poly_base + 2 * ia + 1,
                                      poly_base + 2 * ib,
                                      poly_base + 2 * ib + 1};
        out->add(e, map);
      }
    }
    // vertex-vertex pairs
    for (int v = 0; v < poly.vertex_count(); ++v) {
      const double dist = (pr - poly.vertices[v]).norm();
      if (dist >= params.d_hat) continue;
      if (dist <= 0.0) throw InfeasibleError("penetration");
      constexpr int nvars = 4;
      const V2<T> p = make_point<T>(nvars, 0, pr);
      const V2<T> q = make_point<T>(nvars, 2, poly.vertices[v]);
      const T e = params.kappa * barrier_phi((p - q).norm(), params.d_hat);
      total += AdTraits<T>::value(e);
      if constexpr (Derivs) {
        const std::vector<int> map = {2 * k, 2 * k + 1, poly_base + 2 * v, poly_base + 2 * v + 1};
        out->add(e, map);
      }
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// IMLS
// ---------------------------------------------------------------------------

struct ImlsSupportData {
  std::vector<int> support;
  Eigen::VectorXd weights;  // frozen IRLS weights
  double psi = 0.0;
  Vec2 grad = Vec2::Zero();
};

// Plain-double robust IMLS evaluation with IRLS re-weighting. Within each
// pass the weights are constants; the spatial gradient is analytic.
ImlsSupportData imls_prepare(const Vec2& x, const Polyline& poly, const std::vector<Vec2>& normals,
                             const ImlsParams& params, const std::vector<int>& support) {
  ImlsSupportData out;
  out.support = support;
  const int m = static_cast<int>(support.size());
  out.weights = Eigen::VectorXd::Ones(m);
  if (m == 0) return out;

  const double R2 = params.R * params.R;
  Eigen::VectorXd d(m), phi(m);
  std::vector<Vec2> dphi(m), nrm(m), dv(m);
  for (int j = 0; j < m; ++j) {
    const Vec2& xi = poly.vertices[support[j]];
    nrm[j] = normals[support[j]];
    dv[j] = x - xi;
    const double s = dv[j].squaredNorm() / R2;
    const double t = 1.0 - s;
    phi[j] = t * t * t * t;
    dphi[j] = -8.0 * t * t * t / R2 * dv[j];
    d[j] = nrm[j].dot(dv[j]);
  }

  auto evaluate = [&](const Eigen::VectorXd& w, double& f, Vec2& grad) {
    double num = 0, den = 0;
    Vec2 dnum = Vec2::Zero(), dden = Vec2::Zero();
    for (int j = 0; j < m; ++j) {
      num += d[j] * phi[j] * w[j];
      den += phi[j] * w[j];
      dnum += (nrm[j] * phi[j] + d[j] * dphi[j]) * w[j];
      dden += dphi[j] * w[j];
    }
    if (den <= 0.0) throw InfeasibleError("out of support");
    f = num / den;
    grad = (dnum - f * dden) / den;
  };

  double f;
  Vec2 grad;
  evaluate(out.weights, f, grad);
  for (int k = 0; k < params.irls_iters; ++k) {
    for (int j = 0; j < m; ++j) {
      const double r = f - d[j];
      const double dn = (grad - nrm[j]).norm();
      out.weights[j] = std::exp(-r * r / (params.sigma_r * params.sigma_r)) *
                       std::exp(-dn * dn / (params.sigma_n * params.sigma_n));
    }
    evaluate(out.weights, f, grad);
  }
  out.psi = f;
  out.grad = grad;
  return out;
}

// Templated robust-IMLS value with frozen weights. Vertex access goes through
// `vert`; normals are recomputed from neighbor positions (chain rule through
// vertex_normals) unless the cloud is a single sample.
template <class T, class GetVert>
T imls_psi_element(int nvars, const V2<T>& x, const Polyline& poly,
                   const std::vector<int>& support, const Eigen::VectorXd& w, double R,
                   GetVert vert, bool normals_from_geometry) {
  const double inv_R2 = 1.0 / (R * R);
  T num = AdTraits<T>::constant(nvars, 0.0);
  T den = AdTraits<T>::constant(nvars, 0.0);
  const int n = poly.vertex_count();
  for (size_t j = 0; j < support.size(); ++j) {
    const int vid = support[j];
    const V2<T> xi = vert(vid);
    V2<T> nj;
    if (normals_from_geometry) {
      V2<T> chord;
      if (poly.closed) {
        chord = vert((vid + 1) % n) - vert((vid + n - 1) % n);
      } else if (vid == 0) {
        chord = vert(1) - vert(0);
      } else if (vid == n - 1) {
        chord = vert(n - 1) - vert(n - 2);
      } else {
        chord = vert(vid + 1) - vert(vid - 1);
      }
      const V2<T> ns = perp_outward(chord);
      const T len = ns.norm();
      nj = {ns.x / len, ns.y / len};
    } else {
      nj = make_const_point<T>(nvars, poly.normals[vid]);
    }
    const V2<T> dvec = x - xi;
    const T t = 1.0 - dvec.squaredNorm() * inv_R2;
    const T phi = (t * t) * (t * t);
    const T pw = phi * w[static_cast<int>(j)];
    num = num + nj.dot(dvec) * pw;
    den = den + pw;
  }
  return num / den;
}

std::vector<int> imls_stencil(const Polyline& poly, const std::vector<int>& support) {
  std::set<int> verts(support.begin(), support.end());
  const int n = poly.vertex_count();
  for (int vid : support) {
    if (poly.closed) {
      verts.insert((vid + 1) % n);
      verts.insert((vid + n - 1) % n);
    } else {
      if (vid > 0) verts.insert(vid - 1);
      if (vid < n - 1) verts.insert(vid + 1);
    }
  }
  return {verts.begin(), verts.end()};
}

std::vector<Vec2> imls_normals(const Polyline& poly) {
  if (poly.vertex_count() >= 2) return vertex_normals(poly).normals;
  if (!poly.has_normals()) throw GeometryError("single-sample cloud needs explicit normals");
  return poly.normals;
}

template <class T, bool Derivs>
double imls_core(const std::vector<Vec2>& probes, const Polyline& poly,
                 const BarrierParams& params, const ImlsParams& imls, Assembler* out,
                 const std::vector<FrozenImlsProbe>* frozen) {
  params.validate();
  imls.validate();
  if (imls.R < 2.0 * params.d_hat) throw ConfigError("IMLS requires R >= 2*d_hat");
  const int np = static_cast<int>(probes.size());
  const int nv = poly.vertex_count();
  const int poly_base = 2 * np;
  const bool normals_from_geometry = nv >= 2;
  const std::vector<Vec2> normals = imls_normals(poly);
  const SupportGrid grid(poly, imls.R);
  double total = 0.0;

  for (int k = 0; k < np; ++k) {
    std::vector<int> support;
    Eigen::VectorXd weights;
    if (frozen) {
      support = (*frozen)[k].support;
      weights = (*frozen)[k].weights;
      if (support.empty()) continue;
    } else {
      support = grid.query(probes[k]);
      if (support.empty()) continue;  // R >= 2*d_hat guarantees distance > d_hat
      const ImlsSupportData data = imls_prepare(probes[k], poly, normals, imls, support);
      if (data.psi <= 0.0) throw InfeasibleError("penetration");
      if (data.psi >= params.d_hat) continue;
      weights = data.weights;
    }

    const std::vector<int> stencil = imls_stencil(poly, support);
    const int nvars = 2 + 2 * static_cast<int>(stencil.size());
    std::vector<int> local_of_vertex(nv, -1);
    for (size_t i = 0; i < stencil.size(); ++i)
      local_of_vertex[stencil[i]] = 2 + 2 * static_cast<int>(i);

    const V2<T> x = make_point<T>(nvars, 0, probes[k]);
    auto vert = [&](int vid) -> V2<T> {
      const int loc = local_of_vertex[vid];
      if (loc < 0) return make_const_point<T>(nvars, poly.vertices[vid]);
      return make_point<T>(nvars, loc, poly.vertices[vid]);
    };
    const T psi =
        imls_psi_element<T>(nvars, x, poly, support, weights, imls.R, vert, normals_from_geometry);
    const double psi_v = AdTraits<T>::value(psi);
    if (psi_v <= 0.0) throw InfeasibleError("penetration");
    if (psi_v >= params.d_hat) continue;
    const T e = params.kappa * barrier_phi(psi, params.d_hat);
    total += AdTraits<T>::value(e);
    if constexpr (Derivs) {
      std::vector<int> map(nvars);
      map[0] = 2 * k;
      map[1] = 2 * k + 1;
      for (size_t i = 0; i < stencil.size(); ++i) {
        map[2 + 2 * i] = poly_base + 2 * stencil[i];
        map[2 + 2 * i + 1] = poly_base + 2 * stencil[i] + 1;
      }
      out->add(e, map);
    }
  }
  return total;
}

}  // namespace

EnergyDerivatives energy_nts(const std::vector<Vec2>& probes, const Polyline& poly,
                             const BarrierParams& params) {
  Assembler a(2 * static_cast<int>(probes.size()) + 2 * poly.vertex_count());
  nts_core<D2, true>(probes, poly, params, &a);
  return a.finish();
}

EnergyDerivatives energy_ipc(const std::vector<Vec2>& probes, const Polyline& poly,
                             const BarrierParams& params) {
  Assembler a(2 * static_cast<int>(probes.size()) + 2 * poly.vertex_count());
  ipc_core<D2, true>(probes, poly, params, &a);
  return a.finish();
}

EnergyDerivatives energy_imls(const std::vector<Vec2>& probes, const Polyline& poly,
                              const BarrierParams& params, const ImlsParams& imls) {
  Assembler a(2 * static_cast<int>(probes.size()) + 2 * poly.vertex_count());
  imls_core<D2, true>(probes, poly, params, imls, &a, nullptr);
  return a.finish();
}

EnergyDerivatives contact_energy(const std::vector<Vec2>& probes, const Polyline& poly,
                                 const ContactFormulation& f) {
  switch (f.kind) {
    case ContactKind::NTS: return energy_nts(probes, poly, f.barrier);
    case ContactKind::IPC: return energy_ipc(probes, poly, f.barrier);
    case ContactKind::IMLS: return energy_imls(probes, poly, f.barrier, f.imls);
  }
  throw ConfigError("bad formulation");
}

double contact_value(const std::vector<Vec2>& probes, const Polyline& poly,
                     const ContactFormulation& f) {
  switch (f.kind) {
    case ContactKind::NTS: return nts_core<double, false>(probes, poly, f.barrier, nullptr);
    case ContactKind::IPC: return ipc_core<double, false>(probes, poly, f.barrier, nullptr);
    case ContactKind::IMLS:
      return imls_core<double, false>(probes, poly, f.barrier, f.imls, nullptr, nullptr);
  }
  throw ConfigError("bad formulation");
}

ImlsEval imls_value(const Vec2& x, const Polyline& poly, const ImlsParams& params) {
  params.validate();
  if (!poly.has_normals()) throw GeometryError("imls_value needs vertex normals");
  const std::vector<int> support = support_query(poly, x, params.R);
  if (support.empty()) throw InfeasibleError("out of support");
  const ImlsSupportData data = imls_prepare(x, poly, poly.normals, params, support);
  return {data.psi, data.grad, data.support, data.weights};
}

std::vector<FrozenImlsProbe> imls_freeze(const std::vector<Vec2>& probes, const Polyline& poly,
                                         const BarrierParams& params, const ImlsParams& imls) {
  const std::vector<Vec2> normals = imls_normals(poly);
  const SupportGrid grid(poly, imls.R);
  std::vector<FrozenImlsProbe> out(probes.size());
  for (size_t k = 0; k < probes.size(); ++k) {
    const std::vector<int> support = grid.query(probes[k]);
    if (support.empty()) continue;
    const ImlsSupportData data = imls_prepare(probes[k], poly, normals, imls, support);
    if (data.psi >= params.d_hat) continue;
    out[k].support = support;
    out[k].weights = data.weights;
  }
  return out;
}

double energy_imls_value_frozen(const std::vector<Vec2>& probes, const Polyline& poly,
                                const BarrierParams& params, const ImlsParams& imls,
                                const std::vector<FrozenImlsProbe>& frozen) {
  return imls_core<double, false>(probes, poly, params, imls, nullptr, &frozen);
}

EnergyDerivatives pairwise_contact(const std::vector<Polyline>& bodies,
                                   const ContactFormulation& f) {
  std::vector<int> offset(bodies.size());
  int dim = 0;
  for (size_t i = 0; i < bodies.size(); ++i) {
    offset[i] = dim;
    dim += 2 * bodies[i].vertex_count();
  }
  EnergyDerivatives total;
  total.gradient = Eigen::VectorXd::Zero(dim);
  std::vector<Eigen::Triplet<double>> trips;
  for (size_t i = 0; i < bodies.size(); ++i) {
    for (size_t j = 0; j < bodies.size(); ++j) {
      if (i == j) continue;
      const EnergyDerivatives ed = contact_energy(bodies[i].vertices, bodies[j], f);
      total.value += ed.value;
      const int np2 = 2 * bodies[i].vertex_count();
      auto to_global = [&](int c) { return c < np2 ? offset[i] + c : offset[j] + (c - np2); };
      for (int c = 0; c < ed.gradient.size(); ++c) total.gradient[to_global(c)] += ed.gradient[c];
      for (int c = 0; c < ed.hessian.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(ed.hessian, c); it; ++it)
          trips.emplace_back(to_global(static_cast<int>(it.row())),
                             to_global(static_cast<int>(it.col())), it.value());
    }
  }
  total.hessian.resize(dim, dim);
  total.hessian.setFromTriplets(trips.begin(), trips.end());
  return total;
}

double pairwise_contact_value(const std::vector<Polyline>& bodies, const ContactFormulation& f) {
  double total = 0.0;
  for (size_t i = 0; i < bodies.size(); ++i)
    for (size_t j = 0; j < bodies.size(); ++j)
      if (i != j) total += contact_value(bodies[i].vertices, bodies[j], f);
  return total;
}

}  // namespace smoothcontact
