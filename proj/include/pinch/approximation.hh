#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pinch/map2d.hh"
#include "pinch/map3d.hh"
#include "pinch/pa_map.hh"
#include "pinch/types.hh"

namespace pinch {

class Rng;

// A piecewise affine map composed with the smooth reparametrization of its
// complex.  The composition keeps the values of f on the skeleton, is C1
// across shared subsimplices, and differs from f only inside the pinch
// supports.  Exactly one of the two reparametrizations is populated.
struct SmoothedMap {
  PiecewiseAffineMap f;
  int dim = 0;
  SmoothingMap2D xi2;
  SmoothingMap3D xi3;
  VecX cell_deltas;  // build width per cell (uniform in the planar case)

  const SimplicialComplex& complex() const { return f.complex; }
  int num_pinch_maps() const;

  VecX xi(const VecX& x) const;
  MatX xi_jacobian(const VecX& x) const;
  bool xi_in_support(const VecX& x) const;

  // f after xi; throws std::domain_error outside the covered domain
  VecX evaluate(const VecX& x) const;
  // chain rule: the located cell's matrix times the reparametrization Jacobian
  MatX jacobian(const VecX& x) const;
};

SmoothedMap make_smoothed_map(const PiecewiseAffineMap& f, double delta);
// one width per cell; the planar build is scalar, so there the minimum entry
// is used uniformly (conservative for every cell)
SmoothedMap make_smoothed_map(const PiecewiseAffineMap& f, const VecX& cell_deltas);

// norm gauge phi(measure) = measure^(1/p); rejects p < 1 and negative measure
double phi_x(double measure, double p);

// Exact measures and uniform samplers for the elementary pinch supports.
// Every support is a coordinate box in its own cylindrical or slab frame, so
// both are closed form.  Regions of different stages may overlap; the
// multiplicity function counts containing supports for mixture weights.
struct SupportRegion {
  int map_index = -1;
  double measure = 0.0;
};
struct SupportAtlas {
  std::vector<SupportRegion> regions;
  double total = 0.0;  // sum of region measures (overlaps counted per region)
};
SupportAtlas build_support_atlas(const SmoothedMap& sm);
VecX sample_support_region(const SmoothedMap& sm, int map_index, Rng& rng);
int support_multiplicity(const SmoothedMap& sm, const VecX& x);

struct NormQuery {
  std::vector<double> p_values = {1.0, 2.0};
  int samples = 200000;
  unsigned long seed = 2026u;
};

// Norms of f - f after xi.  The W^1,p error combines the value and gradient
// differences; both vanish identically outside the pinch supports, so the
// integrals are estimated by stratified importance sampling over the support
// atlas (unbiased mixture estimator, standard errors reported).
struct NormReport {
  double delta = 0.0;  // smallest build width
  VecX cell_deltas;
  std::vector<double> p_values;
  std::vector<double> w1p;         // ||f - smoothed||_W1p
  std::vector<double> w1p_stderr;  // delta-method standard error of each norm
  MatX per_cell;                   // cells x p: (integral restricted to the cell)^(1/p)
  VecX per_cell_support;           // measure of {xi != id} inside each cell
  double linf = 0.0;               // sup |f - smoothed|, attained inside the supports
  VecX linf_point;
  double support_fraction = 0.0;  // |{xi != id} in the domain| / |domain|
  double sup_jacobian = 0.0;      // sampled sup Frobenius norm of the xi Jacobian
  int samples = 0;
  unsigned long seed = 0;
  std::string method;
};

NormReport compute_norms(const SmoothedMap& sm, const NormQuery& q);
double norm_linf_diff(const SmoothedMap& sm, int samples, unsigned long seed,
                      VecX* argmax = nullptr);
double norm_w1p_diff(const SmoothedMap& sm, double p, int samples, unsigned long seed);

// CSV serialization: header plus one row per p value
std::string norm_csv_header();
std::string norm_csv_rows(const NormReport& report);

// Boundary-collar volume |{x in the cell : dist(x, boundary) < rho}| from a
// fixed importance sample drawn once near the boundary, reusable across rho.
// For a simplex the complement is the inner parallel body, an incenter
// homothet, so the exact value is available as a cross-check.
struct CollarSampler {
  double cell_measure = 0.0;
  double inradius = 0.0;
  double boundary = 0.0;     // total facet content, the initial collar growth rate
  std::vector<double> dist;  // sorted boundary distances of the kept draws
  std::vector<double> cum;   // importance weights accumulated along dist
  double anchor_rho = 0.0;   // below this the sample is too sparse; the linear
                             // bound boundary * rho (an overestimate, so width
                             // selection stays conservative) takes over
  double volume(double rho) const;
};
CollarSampler make_collar_sampler(const SimplicialComplex& cpx, int cell, int samples, Rng& rng);
double exact_collar_volume(const SimplicialComplex& cpx, int cell, double rho);

// Width selection for a requested W^1,p error bound eps: each cell receives
// the error budget eps 2^-(i+1) and the width solving
//   gauge(collar volume) < budget / (2 (1 + C) |Df_i|),   C = 8 bootstrap,
// capped by the geometric clearance constants; an a-posteriori norm check
// halves every width until the achieved error is below eps.
struct WidthChoice {
  VecX cell_deltas;
  VecX cell_budget;
  double uniform = 0.0;  // smallest entry
  int shrink_rounds = 0;
  double achieved = 0.0;  // W^1,p error of the final build
};
using VolumeGauge = std::function<double(double)>;
WidthChoice choose_deltas(const PiecewiseAffineMap& f, double eps, double p,
                          unsigned long seed = 7u, int collar_samples = 1000000,
                          VolumeGauge gauge = {});

}  // namespace pinch
