#include "hsmooth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hsmooth/diagnostics.hpp"
#include "hsmooth/error.hpp"
#include "hsmooth/io.hpp"

#ifndef HSMOOTH_DATA_DIR
#define HSMOOTH_DATA_DIR "data"
#endif

namespace hsmooth {

RoughTemplate RoughTemplate::load(const std::string& path) {
  const GridData g = ingest_grid(path);
  if (g.members.size() != 1) {
    throw IngestError("template " + path + " must hold a single grid");
  }
  RoughTemplate t;
  t.nx = g.nx;
  t.ny = g.ny;
  t.labels.resize(static_cast<std::size_t>(g.nx * g.ny));
  for (Index k = 0; k < g.nx * g.ny; ++k) {
    const double v = g.members[0][k];
    const long label = std::lround(v);
    if (std::abs(v - static_cast<double>(label)) > 0 || label < 0 || label > 3) {
      throw IngestError("template labels must be integers in 0..3");
    }
    t.labels[static_cast<std::size_t>(k)] = static_cast<int>(label);
  }
  return t;
}

RoughTemplate RoughTemplate::bundled() {
  return load(std::string(HSMOOTH_DATA_DIR) + "/rough_template_v1.csv");
}

RoughTemplate RoughTemplate::resample(Index new_nx, Index new_ny) const {
  if (new_nx < 1 || new_ny < 1) throw InvalidGridError("resample to an empty grid");
  RoughTemplate t;
  t.nx = new_nx;
  t.ny = new_ny;
  t.plateau = plateau;
  t.labels.resize(static_cast<std::size_t>(new_nx * new_ny));
  // Cell centres in [0, 1], mapped to the nearest source cell centre.
  auto src = [](Index i, Index n_new, Index n_old) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n_new);
    const auto j = static_cast<Index>(std::floor(u * static_cast<double>(n_old)));
    return std::clamp<Index>(j, 0, n_old - 1);
  };
  for (Index r = 0; r < new_ny; ++r) {
    for (Index c = 0; c < new_nx; ++c) {
      const Index sr = src(r, new_ny, ny);
      const Index sc = src(c, new_nx, nx);
      t.labels[static_cast<std::size_t>(r * new_nx + c)] =
          labels[static_cast<std::size_t>(sr * nx + sc)];
    }
  }
  return t;
}

Eigen::VectorXd RoughTemplate::field(double magnitude) const {
  Eigen::VectorXd f(nx * ny);
  for (Index k = 0; k < nx * ny; ++k) {
    f[k] = magnitude * plateau[static_cast<std::size_t>(labels[static_cast<std::size_t>(k)])];
  }
  return f;
}

Eigen::VectorXd ngp_field_from_lambda(const DiffMatrix& diff,
                                      const Eigen::VectorXd& lambda2,
                                      const AnchorSpec& anchor,
                                      const Eigen::VectorXd& noise) {
  const SparseMatrix Q = build_Q(diff, lambda2, anchor);
  if (noise.size() != Q.rows()) {
    throw DimensionError("noise has length " + std::to_string(noise.size()) +
                         ", field has " + std::to_string(Q.rows()) + " cells");
  }
  return spd_factorize(Q).whiten_inverse(noise);
}

Eigen::VectorXd simulate_ngp_field(const GridGraph& grid,
                                   const ScalingPrior& prior, Rng& rng,
                                   const std::optional<Eigen::VectorXd>& shared_noise,
                                   const AnchorSpec& anchor) {
  const DiffMatrix diff = build_diff_matrix(grid, 1);
  const Eigen::VectorXd lambda2 = simulate_lambda(prior, diff.rows(), rng);
  const Eigen::VectorXd noise =
      shared_noise ? *shared_noise : draw::normal_vector(grid.n(), rng);
  return ngp_field_from_lambda(diff, lambda2, anchor.resolve(grid), noise);
}

ScalingPrior simulation_prior(const std::string& name) {
  ScalingPrior p = make_prior(name);
  if (auto* nj = std::get_if<NormalJeffreysPrior>(&p.family)) {
    nj->log_lower = std::log(1e-8);
    nj->log_upper = std::log(1e8);
  }
  return p;
}

Eigen::VectorXd simulate_gp_field(const TpsKernel& unit_kernel, double sigma2,
                                  Rng& rng) {
  if (!(sigma2 >= 0.0)) throw ConfigError("sigma2 must be non-negative");
  return std::sqrt(sigma2) *
         (unit_kernel.M * draw::normal_vector(unit_kernel.M.rows(), rng));
}

SyntheticData make_synthetic(const TpsKernel& unit_kernel,
                             const RoughTemplate& tmpl, double magnitude,
                             double tau2, Rng& rng, Index members,
                             double sigma2) {
  const Index n = unit_kernel.M.rows();
  if (tmpl.nx * tmpl.ny != n) {
    throw DimensionError("template grid does not match the kernel grid");
  }
  if (!(tau2 >= 0.0)) throw ConfigError("tau2 must be non-negative");
  if (members < 1) throw ConfigError("need at least one member");
  SyntheticData d;
  d.magnitude = magnitude;
  d.tau2 = tau2;
  d.sigma2 = sigma2;
  d.y = simulate_gp_field(unit_kernel, sigma2, rng);
  d.gamma = tmpl.field(magnitude);
  for (Index i = 0; i < members; ++i) {
    Eigen::VectorXd eps = std::sqrt(tau2) * draw::normal_vector(n, rng);
    d.z.push_back(d.y + d.gamma + eps);
    d.noise.push_back(std::move(eps));
  }
  return d;
}

bool is_canonical_level(double magnitude, double tau2) {
  const std::array<double, 4> mags{0.5, 1.0, 2.0, 4.0};
  const std::array<double, 3> noise{0.001, 0.01, 0.1};
  return std::find(mags.begin(), mags.end(), magnitude) != mags.end() &&
         std::find(noise.begin(), noise.end(), tau2) != noise.end();
}

double step_structure_ratio(const GridGraph& grid, const Eigen::VectorXd& field) {
  if (field.size() != grid.n()) throw DimensionError("field does not match grid");
  std::vector<double> d;
  d.reserve(grid.edges.size());
  for (const auto& e : grid.edges) d.push_back(std::abs(field[e.i] - field[e.j]));
  const double q95 = quantile(d, 0.95);
  if (!(q95 > 0.0)) return 1.0;
  return quantile(d, 0.5) / q95;
}

bool has_step_structure(const GridGraph& grid, const Eigen::VectorXd& field) {
  return step_structure_ratio(grid, field) < 0.01;
}

}  // namespace hsmooth
