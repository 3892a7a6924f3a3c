#include "hftkin/boltzmann.hpp"

#include <algorithm>
#include <cmath>

#include "hftkin/errors.hpp"
#include "hftkin/oracle.hpp"

namespace hftkin {

namespace {

// out(m) = f(r_m + delta), linear interpolation, zero outside the grid.
void shifted(const Eigen::Ref<const Eigen::VectorXd>& f, double delta, double h, Eigen::Ref<Eigen::VectorXd> out) {
  const auto M = f.size();
  const double u = delta / h;
  const double jf = std::floor(u);
  const auto j = static_cast<Eigen::Index>(jf);
  const double a = u - jf;
  const double* src = f.data();
  double* dst = out.data();
  for (Eigen::Index m = 0; m < M; ++m) {
    const Eigen::Index i0 = m + j, i1 = i0 + 1;
    const double v0 = (i0 >= 0 && i0 < M) ? src[i0] : 0.0;
    const double v1 = (i1 >= 0 && i1 < M) ? src[i1] : 0.0;
    dst[m] = (1.0 - a) * v0 + a * v1;
  }
}

void slope_into(const ProfileGrid& g, SlopeScheme scheme, Eigen::MatrixXd& D) {
  const int M = g.cells(), K = g.nbins();
  D.resize(M, K);
  for (int k = 0; k < K; ++k) {
    const auto f = g.phi.col(k);
    for (int m = 0; m < M; ++m) {
      const double left = (f[m] - (m > 0 ? f[m - 1] : f[m])) / g.h;
      const double right = ((m + 1 < M ? f[m + 1] : f[m]) - f[m]) / g.h;
      if (scheme == SlopeScheme::upwind) {
        D(m, k) = std::max({left, -right, 0.0});
      } else if (left * right <= 0.0) {
        D(m, k) = std::max(std::abs(left), std::abs(right));
      } else {
        D(m, k) = 0.5 * std::abs(left + right);
      }
    }
  }
}

// Right-hand side of the kinetic equation and the largest diagonal loss rate.
void evaluate(const ProfileGrid& g, Eigen::MatrixXd& rhs, double& max_rate) {
  const int M = g.cells(), K = g.nbins();
  const double h = g.h, s2 = g.sigma * g.sigma;
  rhs.setZero(M, K);

  for (int k = 0; k < K; ++k) {
    const auto f = g.phi.col(k);
    auto out = rhs.col(k);
    for (int m = 0; m < M; ++m) {
      const double left = m > 0 ? f[m - 1] : f[m];
      const double right = m + 1 < M ? f[m + 1] : f[m];
      out[m] = 0.5 * s2 * (left - 2.0 * f[m] + right) / (h * h);
    }
  }
  thread_local Eigen::VectorXd rate;
  thread_local Eigen::MatrixXd D;
  rate.setConstant(static_cast<Eigen::Index>(M) * K, s2 / (h * h));
  if (g.n_traders > 0) {
    slope_into(g, SlopeScheme::upwind, D);
    const double n = g.n_traders;
    Eigen::VectorXd G(M), H(M), tmp(M), Gk(M), Hk(M), J(M), inflow(M);
    for (int s : {+1, -1}) {
      G.setZero();
      H.setZero();
      for (int k = 0; k < K; ++k) {
        const double shift = -s * 0.5 * g.bins.L[k];
        shifted(g.phi.col(k), shift, h, tmp);
        G += g.bins.weight[k] * tmp;
        shifted(D.col(k), shift, h, tmp);
        H += g.bins.weight[k] * tmp;
      }
      for (int k = 0; k < K; ++k) {
        const double half = 0.5 * g.bins.L[k];
        shifted(G, -s * half, h, Gk);
        shifted(H, -s * half, h, Hk);
        J = 0.5 * s2 * (D.col(k).array() * Gk.array() + g.phi.col(k).array() * Hk.array()).matrix();
        shifted(J, s * half, h, inflow);
        rhs.col(k) += n * (inflow - J);
        rate.segment(static_cast<Eigen::Index>(k) * M, M).array() += n * 0.5 * s2 * (Gk.array() / h + Hk.array());
      }
    }
  }
  max_rate = rate.maxCoeff();
}

}  // namespace

SpreadBins discretize(const SpreadLaw& law, int bins) {
  validate(law);
  SpreadBins b;
  if (law.is_point_mass()) {
    b.L = Eigen::VectorXd::Constant(1, law.l_star);
    b.weight = Eigen::VectorXd::Ones(1);
    return b;
  }
  if (bins < 1) throw ConfigError("discretize: bins must be >= 1");
  b.L.resize(bins);
  b.weight.resize(bins);
  for (int k = 0; k < bins; ++k) {
    const double a = quantile(law, static_cast<double>(k) / bins);
    const double c = k + 1 == bins ? support_max(law, 1e-16) : quantile(law, static_cast<double>(k + 1) / bins);
    const double mass = mass_between(law, a, c);
    b.L[k] = mean_between(law, a, c) / mass;
    b.weight[k] = mass;
  }
  b.weight /= b.weight.sum();
  return b;
}

Eigen::VectorXd ProfileGrid::r_grid() const {
  Eigen::VectorXd r(cells());
  for (int m = 0; m < cells(); ++m) r[m] = this->r(m);
  return r;
}

ProfileGrid make_grid(const SpreadLaw& law, int n_traders, double sigma, double h, int bins,
                      std::optional<double> l_cut) {
  if (n_traders < 0) throw ConfigError("make_grid: n_traders must be >= 0");
  if (!(h > 0.0) || !(sigma > 0.0)) throw ConfigError("make_grid: h and sigma must be positive");
  ProfileGrid g;
  g.bins = discretize(law, bins);
  g.n_traders = n_traders;
  g.sigma = sigma;
  const double l_max = g.bins.L.maxCoeff();
  const double cut = l_cut.value_or(3.0 * l_max);
  if (!(cut > l_max)) throw ConfigError("make_grid: L_cut must exceed the largest spread");
  const int M = static_cast<int>(std::ceil(cut / h));
  g.h = h;
  g.r_min = -0.5 * M * h;
  g.phi.setZero(M, g.bins.L.size());
  return g;
}

void normalize(ProfileGrid& g) {
  for (int k = 0; k < g.nbins(); ++k) {
    const double m = g.mass(k);
    if (!(m > 0.0)) throw DomainError("normalize: empty profile");
    g.phi.col(k) /= m;
  }
}

void set_initial(ProfileGrid& g, InitialGuess guess) {
  for (int k = 0; k < g.nbins(); ++k) {
    const double L = g.bins.L[k];
    for (int m = 0; m < g.cells(); ++m) {
      const double r = g.r(m);
      double v = 0.0;
      switch (guess) {
        case InitialGuess::tent: v = oracle::tent_profile(L, r); break;
        case InitialGuess::gaussian: v = std::exp(-0.5 * std::pow(r / (0.25 * L), 2)); break;
        case InitialGuess::uniform: v = std::abs(r) <= 0.5 * L ? 1.0 : 0.0; break;
      }
      g.phi(m, k) = v;
    }
  }
  normalize(g);
}

Eigen::MatrixXd slope_magnitude(const ProfileGrid& g, SlopeScheme scheme) {
  Eigen::MatrixXd D;
  slope_into(g, scheme, D);
  return D;
}

double interpolate(const ProfileGrid& g, const Eigen::Ref<const Eigen::VectorXd>& f, double x) {
  const double u = (x - g.r_min) / g.h - 0.5;
  const double jf = std::floor(u);
  const auto j = static_cast<Eigen::Index>(jf);
  const double a = u - jf;
  const auto M = f.size();
  const double v0 = (j >= 0 && j < M) ? f[j] : 0.0;
  const double v1 = (j + 1 >= 0 && j + 1 < M) ? f[j + 1] : 0.0;
  return (1.0 - a) * v0 + a * v1;
}

double collision_flux(const ProfileGrid& g, int k, int k2, int s, double r, SlopeScheme scheme) {
  const double r2 = r - s * 0.5 * (g.bins.L[k] + g.bins.L[k2]);
  const Eigen::MatrixXd D = slope_magnitude(g, scheme);
  const double s2 = g.sigma * g.sigma;
  return 0.5 * s2 *
         (interpolate(g, D.col(k), r) * interpolate(g, g.phi.col(k2), r2) +
          interpolate(g, g.phi.col(k), r) * interpolate(g, D.col(k2), r2));
}

double stable_dt(const ProfileGrid& g) {
  Eigen::MatrixXd rhs;
  double rate = 0.0;
  evaluate(g, rhs, rate);
  return 1.0 / rate;
}

StepReport step(ProfileGrid& g, double dt, double safety) {
  thread_local Eigen::MatrixXd rhs;
  double rate = 0.0;
  evaluate(g, rhs, rate);
  StepReport rep;
  rep.dt_limit = 1.0 / rate;
  if (dt <= 0.0) dt = safety * rep.dt_limit;
  if (dt > rep.dt_limit * (1.0 + 1e-12))
    throw StabilityError("boltzmann step: dt = " + std::to_string(dt) + " exceeds the bound " +
                         std::to_string(rep.dt_limit));
  rep.dt = dt;

  const int K = g.nbins();
  for (int k = 0; k < K; ++k) {
    const double before = g.phi.col(k).sum() * g.h;
    rep.residual += g.bins.weight[k] * rhs.col(k).cwiseAbs().sum() * g.h;
    g.phi.col(k) += dt * rhs.col(k);
    const double after = g.phi.col(k).sum() * g.h;
    rep.max_mass_change = std::max(rep.max_mass_change, std::abs(after - before));
    double negative = 0.0;
    for (int m = 0; m < g.cells(); ++m) {
      if (g.phi(m, k) < 0.0) {
        negative -= g.phi(m, k);
        g.phi(m, k) = 0.0;
        ++rep.clipped_cells;
      }
    }
    if (negative > 0.0) {
      rep.clipped_mass += negative * g.h;
      g.phi.col(k) *= before / (g.phi.col(k).sum() * g.h);
    }
  }
  return rep;
}

SteadyResult solve_steady(ProfileGrid grid0, double tolerance, double max_time) {
  SteadyResult res;
  res.grid = std::move(grid0);
  while (res.time < max_time) {
    const StepReport rep = step(res.grid, 0.0);
    res.time += rep.dt;
    ++res.steps;
    res.residual = rep.residual;
    res.max_mass_change = std::max(res.max_mass_change, rep.max_mass_change);
    res.clipped_mass += rep.clipped_mass;
    if (rep.clipped_cells > 0) ++res.clip_events;
    if (rep.residual < tolerance) {
      res.converged = true;
      break;
    }
  }
  return res;
}

Eigen::VectorXd ask_book(const ProfileGrid& g) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(g.cells()), tmp(g.cells());
  for (int k = 0; k < g.nbins(); ++k) {
    shifted(g.phi.col(k), -0.5 * g.bins.L[k], g.h, tmp);
    f += g.bins.weight[k] * tmp;
  }
  return f;
}

Eigen::VectorXd bid_book(const ProfileGrid& g) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(g.cells()), tmp(g.cells());
  for (int k = 0; k < g.nbins(); ++k) {
    shifted(g.phi.col(k), 0.5 * g.bins.L[k], g.h, tmp);
    f += g.bins.weight[k] * tmp;
  }
  return f;
}

}  // namespace hftkin
