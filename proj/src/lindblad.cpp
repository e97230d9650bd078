#include "purcell/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "purcell/errors.hpp"
#include "purcell/ode.hpp"
#include "purcell/rates.hpp"

namespace purcell {

namespace {

using SparseCd = Eigen::SparseMatrix<complexd>;

SparseCd to_sparse(const Eigen::MatrixXcd& m) {
  std::vector<Eigen::Triplet<complexd>> trip;
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (m(i, j) != complexd(0.0, 0.0)) trip.emplace_back(i, j, m(i, j));
  SparseCd s(m.rows(), m.cols());
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

void check_shape(const DensityMatrix& rho) {
  const int d = rho.space.dim();
  if (rho.entries.rows() != d || rho.entries.cols() != d)
    throw std::invalid_argument("density matrix shape does not match its space");
}

// excited-ladder weight of rho; the angles are those of dressed_state
double excited_weight(const Eigen::Ref<const Eigen::MatrixXcd>& rho, const SpaceDescriptor& space,
                      const DressedBasis& basis) {
  double ee = 0.0;
  for (int n = 0; n + 1 <= space.fock_cutoff; ++n) {
    const double th = basis.theta(n + 1.0);
    const double c = std::cos(th), s = std::sin(th);
    const int ie = space.index(1, n), ig = space.index(0, n + 1);
    ee += std::real(c * c * rho(ie, ie) + s * s * rho(ig, ig) +
                    c * s * (rho(ie, ig) + rho(ig, ie)));
  }
  return ee;
}

struct SampleWindow {
  int first = 0;   // inclusive indices into the time grid
  int last = -1;
};

SampleWindow window_indices(const std::vector<double>& times, double t_start, double t_end) {
  SampleWindow w;
  const double slack = 1e-12 * (1.0 + std::abs(times.back()));
  w.first = static_cast<int>(times.size());
  for (int i = 0; i < static_cast<int>(times.size()); ++i) {
    if (times[i] >= t_start - slack) { w.first = i; break; }
  }
  w.last = -1;
  for (int i = static_cast<int>(times.size()) - 1; i >= 0; --i) {
    if (times[i] <= t_end + slack) { w.last = i; break; }
  }
  return w;
}

struct LineFit {
  double slope = 0.0;
  double r_squared = 1.0;
};

LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  const int m = static_cast<int>(x.size());
  double xm = 0.0, ym = 0.0;
  for (int i = 0; i < m; ++i) { xm += x[i]; ym += y[i]; }
  xm /= m; ym /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < m; ++i) {
    const double dx = x[i] - xm, dy = y[i] - ym;
    sxx += dx * dx; sxy += dx * dy; syy += dy * dy;
  }
  if (sxx == 0.0) throw fit_error("rate fit: degenerate time window");
  LineFit f;
  f.slope = sxy / sxx;
  if (syy == 0.0) {
    f.r_squared = 1.0;  // exactly flat data, slope 0
  } else {
    const double ssr = std::max(0.0, syy - sxy * sxy / sxx);
    f.r_squared = 1.0 - ssr / syy;
  }
  return f;
}

}  // namespace

DensityDiagnostics density_diagnostics(const DensityMatrix& rho) {
  check_shape(rho);
  DensityDiagnostics d;
  d.hermiticity_deviation = (rho.entries - rho.entries.adjoint()).cwiseAbs().maxCoeff();
  d.trace_deviation = std::abs(rho.entries.trace() - complexd(1.0, 0.0));
  const Eigen::MatrixXcd herm = 0.5 * (rho.entries + rho.entries.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues()(0);
  return d;
}

bool is_physical(const DensityMatrix& rho) {
  const DensityDiagnostics d = density_diagnostics(rho);
  return d.hermiticity_deviation <= 1e-10 && d.trace_deviation <= 1e-8 &&
         d.min_eigenvalue > -1e-8;
}

DensityMatrix initial_state(DressedLabel ladder, const SystemParams& params,
                            const SpaceDescriptor& space) {
  const double sign = (ladder == DressedLabel::excited) ? 1.0 : -1.0;
  complexd alpha(0.0, 0.0);
  if (params.epsilon != 0.0) {
    const double n_ss = steady_photon_number(params).front();
    double pull = 0.0;
    if (params.g != 0.0) pull = params.g * params.g / DressedBasis(params).splitting(n_ss);
    const complexd denom(0.5 * params.kappa, sign * pull + params.delta_rd);
    alpha = complexd(0.0, -params.epsilon) / denom;
  }
  const double n_in = std::norm(alpha);
  const int n_top = (ladder == DressedLabel::excited) ? space.fock_cutoff - 1 : space.fock_cutoff;
  if (n_in > 0.0) {
    // Poisson mass the truncated ladder misses; log-weighted like the
    // averaging loops so large amplitudes do not underflow term by term
    double logw = -n_in, kept = 0.0;
    for (int n = 0; n <= n_top; ++n) {
      kept += std::exp(logw);
      logw += std::log(n_in) - std::log(n + 1.0);
    }
    if (1.0 - kept > 1e-9)
      throw truncation_error("initial_state: coherent tail exceeds 1e-9 at this cutoff");
  }
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(space.dim());
  complexd w = std::exp(complexd(-0.5 * n_in, 0.0));
  for (int n = 0; n <= n_top; ++n) {
    psi += w * dressed_state(ladder, n, params, space);
    w *= alpha / std::sqrt(n + 1.0);
  }
  psi /= psi.norm();

  DensityMatrix rho;
  rho.space = space;
  rho.entries = psi * psi.adjoint();
  return rho;
}

LadderPopulations ladder_populations(const DensityMatrix& rho, const SystemParams& params) {
  check_shape(rho);
  LadderPopulations p;
  p.ee = excited_weight(rho.entries, rho.space, DressedBasis(params));
  p.gg = 1.0 - p.ee;
  return p;
}

Trajectory evolve(const DensityMatrix& rho0, const SystemParams& params,
                  const std::vector<double>& t_grid, const EvolveOptions& options) {
  check_shape(rho0);
  if (t_grid.empty()) throw std::invalid_argument("evolve: empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("evolve: time grid must increase strictly");
  if (params.kappa < 0.0) throw std::invalid_argument("evolve: negative kappa");
  if (!is_physical(rho0))
    throw std::invalid_argument("evolve: initial state violates the density-matrix invariants");

  const SpaceDescriptor space = rho0.space;
  const int d = space.dim();
  const SparseCd hs = to_sparse(hamiltonian_rotating(params, space));
  const SparseCd as = to_sparse(elementary_operator(Op::annihilation, space));
  const SparseCd asd = SparseCd(as.adjoint());
  Eigen::VectorXd nvec(d);
  for (int q = 0; q < 2; ++q)
    for (int n = 0; n < space.fock_dim(); ++n) nvec(space.index(q, n)) = n;
  const Eigen::VectorXcd nvec_c = nvec.cast<complexd>();

  const double kappa = params.kappa;
  const auto rhs = [&](double, const Eigen::VectorXcd& y) -> Eigen::VectorXcd {
    const Eigen::Map<const Eigen::MatrixXcd> rho(y.data(), d, d);
    const Eigen::MatrixXcd hr = hs * rho;
    Eigen::MatrixXcd out = complexd(0.0, -1.0) * (hr - hr.adjoint());
    if (kappa != 0.0) {
      const Eigen::MatrixXcd ar = as * rho;
      out.noalias() += kappa * (ar * asd);
      out.noalias() -= (0.5 * kappa) * (nvec_c.asDiagonal() * rho);
      out.noalias() -= (0.5 * kappa) * (rho * nvec_c.asDiagonal());
    }
    return Eigen::Map<const Eigen::VectorXcd>(out.data(), d * d);
  };

  const double trace_gate = 10.0 * options.rel_tol;
  OdeOptions ode_opt;
  ode_opt.rel_tol = options.rel_tol;
  ode_opt.abs_tol = options.abs_tol;
  ode_opt.post_step = [&](double t, Eigen::VectorXcd& y) {
    Eigen::Map<Eigen::MatrixXcd> r(y.data(), d, d);
    const Eigen::MatrixXcd herm = 0.5 * (r + r.adjoint());
    r = herm;
    const double dev = std::abs(herm.trace() - complexd(1.0, 0.0));
    if (dev > trace_gate) {
      std::ostringstream msg;
      msg << "evolve: trace deviation " << dev << " at t = " << t
          << " exceeds 10x the relative tolerance";
      throw integration_failure(msg.str());
    }
  };

  Trajectory traj;
  traj.params = params;
  traj.records.reserve(t_grid.size());
  const DressedBasis basis(params);

  Eigen::VectorXcd y = Eigen::Map<const Eigen::VectorXcd>(rho0.entries.data(), d * d);
  const auto record = [&](double t) {
    const Eigen::Map<const Eigen::MatrixXcd> rho(y.data(), d, d);
    TrajectoryRecord rec;
    rec.t = t;
    rec.ee = excited_weight(rho, space, basis);
    rec.gg = 1.0 - rec.ee;
    rec.mean_photon_number = nvec.dot(rho.diagonal().real());
    rec.trace_deviation = std::abs(rho.trace() - complexd(1.0, 0.0));
    rec.hermiticity_deviation = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (options.check_positivity) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
      rec.min_eigenvalue = es.eigenvalues()(0);
      if (rec.min_eigenvalue < -1e-6) {
        std::ostringstream msg;
        msg << "evolve: eigenvalue " << rec.min_eigenvalue << " at t = " << t
            << " breaches the positivity fail-safe";
        throw integration_failure(msg.str());
      }
    } else {
      rec.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    }
    if (rec.trace_deviation > trace_gate) {
      std::ostringstream msg;
      msg << "evolve: trace deviation " << rec.trace_deviation << " at t = " << t
          << " exceeds 10x the relative tolerance";
      throw integration_failure(msg.str());
    }
    traj.records.push_back(rec);
  };

  record(t_grid.front());
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    integrate_dopri5(rhs, t_grid[i - 1], t_grid[i], y, ode_opt);
    record(t_grid[i]);
  }

  traj.final_state.space = space;
  traj.final_state.entries = Eigen::Map<const Eigen::MatrixXcd>(y.data(), d, d);
  return traj;
}

FitPolicy default_fit_policy(const SystemParams& params, double n_bar) {
  FitPolicy policy;
  policy.t_start = params.kappa > 0.0 ? 5.0 / params.kappa : 0.0;
  const RateSet rates = averaged_rates(n_bar, params);
  policy.gamma_R_estimate = rates.gamma_R;
  policy.gamma_E_estimate = rates.gamma_E;
  return policy;
}

RateFit extract_rate(const std::vector<double>& times, const std::vector<double>& populations,
                     FitMode mode, const FitPolicy& policy) {
  if (times.size() != populations.size())
    throw std::invalid_argument("extract_rate: times and populations differ in length");
  if (times.size() < 2) throw std::invalid_argument("extract_rate: too few samples");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("extract_rate: times must increase strictly");
  if (policy.gamma_R_estimate < 0.0 || policy.gamma_E_estimate < 0.0)
    throw std::invalid_argument("extract_rate: negative rate estimate");

  const double rate_sum = policy.gamma_R_estimate + policy.gamma_E_estimate;
  double floor = 0.0;
  double t_end = times.back();
  if (mode == FitMode::relaxation) {
    if (rate_sum > 0.0) floor = policy.gamma_E_estimate / rate_sum;
  } else {
    if (rate_sum > 0.0) {
      floor = policy.gamma_R_estimate / rate_sum;
      t_end = std::min(t_end, policy.t_start + policy.excitation_window / rate_sum);
    }
  }

  SampleWindow w = window_indices(times, policy.t_start, t_end);
  if (mode == FitMode::relaxation && w.first < static_cast<int>(times.size())) {
    // end at the 1/e drop from the window-start value, and never ride the
    // series down into the saturation floor
    const double p0 = populations[w.first];
    for (int i = w.first; i <= w.last; ++i) {
      if (populations[i] <= 3.0 * floor && floor > 0.0) { w.last = i - 1; break; }
      if (populations[i] <= p0 / std::exp(1.0)) { w.last = i; break; }
    }
  }
  if (w.first >= static_cast<int>(times.size()) || w.last - w.first + 1 < 3)
    throw fit_error("extract_rate: fit window collapsed");

  std::vector<double> ts, ys;
  ts.reserve(w.last - w.first + 1);
  ys.reserve(w.last - w.first + 1);
  for (int i = w.first; i <= w.last; ++i) {
    if (!(populations[i] > 0.0))
      throw fit_error("extract_rate: non-positive population inside the fit window");
    ts.push_back(times[i]);
    ys.push_back(-std::log(populations[i]));
  }

  const LineFit line = least_squares_line(ts, ys);
  if (!(line.r_squared >= policy.min_r_squared)) {
    std::ostringstream msg;
    msg << "extract_rate: r^2 = " << line.r_squared << " below the acceptance threshold "
        << policy.min_r_squared;
    throw fit_error(msg.str());
  }
  if (!(line.slope > 0.0)) throw fit_error("extract_rate: non-positive fitted rate");

  RateFit fit;
  fit.rate = line.slope;
  fit.t_start = ts.front();
  fit.t_end = ts.back();
  fit.r_squared = line.r_squared;
  fit.saturation_floor = floor;
  fit.samples = static_cast<int>(ts.size());
  return fit;
}

double rate_equation_slope(const std::vector<double>& times, double t_start, double t_end,
                           FitMode mode, double gamma_R, double gamma_E) {
  if (times.size() < 2) throw std::invalid_argument("rate_equation_slope: too few samples");
  if (gamma_R < 0.0 || gamma_E < 0.0)
    throw std::invalid_argument("rate_equation_slope: negative rate");
  const double rate_sum = gamma_R + gamma_E;
  if (rate_sum == 0.0) return 0.0;
  const double floor = (mode == FitMode::relaxation ? gamma_E : gamma_R) / rate_sum;
  const SampleWindow w = window_indices(times, t_start, t_end);
  if (w.last - w.first + 1 < 2)
    throw std::invalid_argument("rate_equation_slope: fewer than two samples in the window");
  std::vector<double> ts, ys;
  for (int i = w.first; i <= w.last; ++i) {
    ts.push_back(times[i]);
    ys.push_back(-std::log(floor + (1.0 - floor) * std::exp(-rate_sum * times[i])));
  }
  return least_squares_line(ts, ys).slope;
}

double measure_photon_number(const Trajectory& trajectory) {
  if (trajectory.records.size() < 2)
    throw std::invalid_argument("measure_photon_number: trajectory too short");
  const double kappa = trajectory.params.kappa;
  const double settle = kappa > 0.0 ? 5.0 / kappa : trajectory.records.front().t;
  const double slack = 1e-12 * (1.0 + std::abs(trajectory.records.back().t));
  std::vector<const TrajectoryRecord*> window;
  for (const TrajectoryRecord& rec : trajectory.records)
    if (rec.t >= settle - slack) window.push_back(&rec);
  if (window.size() < 2)
    throw std::invalid_argument("measure_photon_number: trajectory ends before the settling window");
  double acc = 0.0;
  for (std::size_t i = 1; i < window.size(); ++i)
    acc += 0.5 * (window[i]->mean_photon_number + window[i - 1]->mean_photon_number) *
           (window[i]->t - window[i - 1]->t);
  return acc / (window.back()->t - window.front()->t);
}

}  // namespace purcell
