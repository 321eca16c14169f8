// Copyright 2026 The donorsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "donorsim/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/NonLinearOptimization>

#include "donorsim/hamiltonians.hpp"
#include "donorsim/params_io.hpp"
#include "donorsim/sequence.hpp"

namespace donorsim {

using std::numbers::pi;

void NoiseModel::validate() const {
  if (!(sigma_b >= 0) || !(sigma_fq >= 0) || !(t1_electron >= 0))
    throw std::invalid_argument("noise widths and T1 must be non-negative");
  if (!(readout_flip >= 0 && readout_flip <= 1))
    throw std::invalid_argument("readout flip probability must lie in [0, 1]");
}

double transition_frequency(const Transition& t, const DeviceParams& p) {
  const ChargeState c = t.charge_state();
  const EigenSystem es = eigensystem(h_static(p, c), basis_labels(p, c));
  if (!es.labeled()) throw std::runtime_error("eigenstates cannot be labeled at these parameters");
  return std::abs(es.energy(t.to) - es.energy(t.from));
}

TransitionSensitivity transition_sensitivity(const Transition& t, const DeviceParams& p) {
  TransitionSensitivity s;
  const double hb = p.b0 != 0 ? 1e-5 * std::abs(p.b0) : 1e-6;
  DeviceParams lo = p, hi = p;
  lo.b0 -= hb;
  hi.b0 += hb;
  s.df_db0 = (transition_frequency(t, hi) - transition_frequency(t, lo)) / (2 * hb);

  const bool ionised = t.charge_state() == ChargeState::Ionised;
  const double fq = ionised ? p.fq_plus : p.fq_neutral;
  const double hq = std::max(1e3, 0.05 * std::abs(fq));
  lo = p;
  hi = p;
  (ionised ? lo.fq_plus : lo.fq_neutral) = fq - hq;
  (ionised ? hi.fq_plus : hi.fq_neutral) = fq + hq;
  s.df_dfq = (transition_frequency(t, hi) - transition_frequency(t, lo)) / (2 * hq);
  return s;
}

double t2_star_from_sigma(double sigma_f) {
  if (sigma_f == 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(2.0) / (2.0 * pi * sigma_f);
}

DephasingEstimate dephasing_rate(const Transition& t, const NoiseModel& noise, const DeviceParams& p) {
  noise.validate();
  const TransitionSensitivity s = transition_sensitivity(t, p);
  DephasingEstimate d;
  d.sigma_f = std::hypot(s.df_db0 * noise.sigma_b, s.df_dfq * noise.sigma_fq);
  d.t2_star = t2_star_from_sigma(d.sigma_f);
  return d;
}

double calibrate_sigma_fq(const Transition& fast, const Transition& slow, const DeviceParams& p,
                          double sigma_b, double ratio) {
  const TransitionSensitivity f = transition_sensitivity(fast, p);
  const TransitionSensitivity s = transition_sensitivity(slow, p);
  // ratio^2 sigma_slow^2 = sigma_fast^2, solved for sigma_fq^2
  const double r2 = ratio * ratio;
  const double num = sigma_b * sigma_b * (r2 * s.df_db0 * s.df_db0 - f.df_db0 * f.df_db0);
  const double den = f.df_dfq * f.df_dfq - r2 * s.df_dfq * s.df_dfq;
  if (den <= 0 || num < 0) throw std::invalid_argument("no sigma_fq reproduces that T2* ratio");
  return std::sqrt(num / den);
}

DecayCurve simulate_decay(DecaySequence kind, const Transition& t, const NoiseModel& noise,
                          const DeviceParams& p, const std::vector<double>& tau, int draws,
                          std::uint64_t seed, double detuning) {
  if (draws < 100) throw std::invalid_argument("simulate_decay needs at least 100 draws");
  SequenceOptions opt;
  opt.frame_frequency = t.frequency + detuning;
  DecayCurve c;
  for (double tk : tau) {
    if (!(tk >= 0)) throw std::invalid_argument("tau must be non-negative");
    PulseSequence seq;
    seq.add(InstantRotation{pi / 2, 0.0});
    if (tk > 0) seq.add(FreeEvolution{tk});
    if (kind == DecaySequence::Hahn) {
      seq.add(InstantRotation{pi, 0.0});
      if (tk > 0) seq.add(FreeEvolution{tk});
    }
    seq.add(InstantRotation{pi / 2, 0.0});
    seq.add(Readout{});
    const SequenceResult r = run_sequence(seq, t, p, noise, draws, mix_seed(seed, c.tau.size()), opt);
    c.tau.push_back(tk);
    c.probability.push_back(r.readouts[0].p_upper_mean);
    c.std_error.push_back(r.readouts[0].p_upper_std_error);
  }
  return c;
}

void write_decay_csv(std::ostream& out, const DecayCurve& c) {
  out << "tau_s,probability,stderr\n";
  for (std::size_t k = 0; k < c.tau.size(); ++k)
    out << format_double(c.tau[k]) << ',' << format_double(c.probability[k]) << ','
        << format_double(c.std_error[k]) << '\n';
}

const char* to_string(FitStatus s) {
  switch (s) {
    case FitStatus::Ok: return "ok";
    case FitStatus::NotDecaying: return "not-decaying";
    case FitStatus::NoConvergence: return "no-convergence";
  }
  return "?";
}

double decay_model(double tau, double t2, double beta, double amplitude, double offset) {
  return amplitude * std::exp(-std::pow(std::abs(tau / t2), beta)) + offset;
}

namespace {

// Residual functor in the shape Eigen's LevenbergMarquardt expects.
template <class Model>
struct Residuals {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const std::vector<double>* x;
  const std::vector<double>* y;
  int n_params;
  Model model;

  int inputs() const { return n_params; }
  int values() const { return static_cast<int>(x->size()); }
  int operator()(const Eigen::VectorXd& q, Eigen::VectorXd& r) const {
    for (std::size_t k = 0; k < x->size(); ++k) r(k) = model((*x)[k], q) - (*y)[k];
    return 0;
  }
};

template <class Model>
bool least_squares(const std::vector<double>& x, const std::vector<double>& y, Model model,
                   Eigen::VectorXd& q, double& residual) {
  Residuals<Model> f{&x, &y, static_cast<int>(q.size()), model};
  Eigen::NumericalDiff<Residuals<Model>> nd(f);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Residuals<Model>>> lm(nd);
  lm.parameters.maxfev = 4000;
  lm.parameters.xtol = 1e-12;
  lm.parameters.ftol = 1e-14;
  const auto status = lm.minimize(q);
  Eigen::VectorXd r(x.size());
  f(q, r);
  residual = r.norm();
  if (!q.allFinite()) return false;
  using namespace Eigen::LevenbergMarquardtSpace;
  return status == RelativeReductionTooSmall || status == RelativeErrorTooSmall ||
         status == RelativeErrorAndReductionTooSmall || status == CosinusTooSmall ||
         status == FtolTooSmall || status == XtolTooSmall || status == GtolTooSmall;
}

}  // namespace

DecayFit fit_decay(const std::vector<double>& tau, const std::vector<double>& y, DecayModel model) {
  if (tau.size() != y.size()) throw std::invalid_argument("tau and y sizes differ");
  if (tau.size() < 8) throw std::invalid_argument("fit_decay needs at least 8 points");
  DecayFit out;
  const double tmax = *std::max_element(tau.begin(), tau.end());
  if (!(tmax > 0)) throw std::invalid_argument("tau grid must extend past zero");
  auto [ylo, yhi] = std::minmax_element(y.begin(), y.end());
  const double range = *yhi - *ylo;
  const double scale = std::max({1.0, std::abs(*ylo), std::abs(*yhi)});
  if (!(range > 1e-6 * scale)) {
    out.status = FitStatus::NotDecaying;
    return out;
  }
  // normalized time keeps every parameter of order one
  std::vector<double> xs(tau.size());
  for (std::size_t k = 0; k < tau.size(); ++k) xs[k] = tau[k] / tmax;
  std::size_t first = std::min_element(tau.begin(), tau.end()) - tau.begin();
  std::size_t last = std::max_element(tau.begin(), tau.end()) - tau.begin();
  const double off0 = y[last], amp0 = y[first] - y[last];
  double t0 = 1.0;
  for (std::size_t k = 0; k < xs.size(); ++k)
    if (std::abs(y[k] - off0) < std::abs(amp0) / std::exp(1.0)) {
      t0 = std::max(xs[k], 1e-3);
      break;
    }

  Eigen::VectorXd q;
  double res = 0.0;
  bool ok = false;
  if (model == DecayModel::Gaussian) {
    q.resize(3);
    q << t0, amp0, off0;
    ok = least_squares(xs, y,
                       [](double x, const Eigen::VectorXd& v) { return decay_model(x, v(0), 2.0, v(1), v(2)); }, q,
                       res);
    out.t2 = std::abs(q(0)) * tmax;
    out.beta = 2.0;
    out.amplitude = q(1);
    out.offset = q(2);
  } else {
    q.resize(4);
    q << t0, 1.5, amp0, off0;
    ok = least_squares(
        xs, y, [](double x, const Eigen::VectorXd& v) { return decay_model(x, v(0), v(1), v(2), v(3)); }, q,
        res);
    out.t2 = std::abs(q(0)) * tmax;
    out.beta = q(1);
    out.amplitude = q(2);
    out.offset = q(3);
  }
  out.residual_norm = res;
  if (!ok) {
    out.status = FitStatus::NoConvergence;
  } else if (out.t2 > 20.0 * tmax || std::abs(out.amplitude) < 1e-6 * scale || out.beta <= 0.05 ||
             out.beta > 20.0) {
    out.status = FitStatus::NotDecaying;
  } else {
    out.status = FitStatus::Ok;
  }
  return out;
}

DecayFit fit_decay(const DecayCurve& c, DecayModel model) { return fit_decay(c.tau, c.probability, model); }

SinusoidFit fit_sinusoid(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y sizes differ");
  if (x.size() < 8) throw std::invalid_argument("fit_sinusoid needs at least 8 points");
  SinusoidFit out;
  auto [xlo, xhi] = std::minmax_element(x.begin(), x.end());
  const double span = *xhi - *xlo;
  if (!(span > 0)) throw std::invalid_argument("degenerate abscissa");
  double mean = 0.0;
  for (double v : y) mean += v / y.size();
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  if (!(std::sqrt(var / y.size()) > 1e-9 * std::max(1.0, std::abs(mean)))) {
    out.offset = mean;
    out.status = FitStatus::NotDecaying;
    return out;
  }
  // periodogram up to the mean-spacing Nyquist limit, 16x oversampled
  const std::size_t n = x.size();
  const double f_nyq = 0.5 * (n - 1) / span;
  const int n_f = static_cast<int>(16 * n);
  double best_f = 0.0, best_p = -1.0;
  for (int k = 1; k <= n_f; ++k) {
    const double f = f_nyq * k / n_f;
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += (y[j] - mean) * std::polar(1.0, -2.0 * pi * f * (x[j] - *xlo));
    if (std::norm(acc) > best_p) {
      best_p = std::norm(acc);
      best_f = f;
    }
  }
  const double x0 = *xlo;
  std::vector<double> xs(n);
  for (std::size_t j = 0; j < n; ++j) xs[j] = (x[j] - x0) / span;
  // linear solve for amplitude and phase at the seed frequency
  Eigen::MatrixXd basis(n, 3);
  Eigen::VectorXd yy(n);
  for (std::size_t j = 0; j < n; ++j) {
    basis(j, 0) = std::cos(2 * pi * best_f * span * xs[j]);
    basis(j, 1) = std::sin(2 * pi * best_f * span * xs[j]);
    basis(j, 2) = 1.0;
    yy(j) = y[j];
  }
  const Eigen::Vector3d lin = basis.colPivHouseholderQr().solve(yy);
  Eigen::VectorXd q(4);
  q << best_f * span, std::hypot(lin(0), lin(1)), std::atan2(-lin(1), lin(0)), lin(2);
  double res = 0.0;
  const bool ok = least_squares(
      xs, y, [](double u, const Eigen::VectorXd& v) { return v(1) * std::cos(2 * pi * v(0) * u + v(2)) + v(3); }, q,
      res);
  double amp = q(1), ph = q(2);
  if (amp < 0) {
    amp = -amp;
    ph += pi;
  }
  out.frequency = std::abs(q(0)) / span;
  if (q(0) < 0) ph = -ph;
  // refer the phase back to x = 0
  ph -= 2 * pi * out.frequency * x0;
  out.phase = std::remainder(ph, 2 * pi);
  out.amplitude = amp;
  out.offset = q(3);
  out.residual_norm = res;
  out.status = ok ? FitStatus::Ok : FitStatus::NoConvergence;
  return out;
}

ShockReadout readout_with_shock(const std::vector<double>& probabilities, int shots, double flip_prob,
                                std::uint64_t seed, bool persistent) {
  if (probabilities.empty()) throw std::invalid_argument("empty probability vector");
  double total = 0.0;
  for (double v : probabilities) {
    if (!(v >= 0)) throw std::invalid_argument("probabilities must be non-negative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("probabilities must sum to 1");
  if (!(flip_prob >= 0 && flip_prob <= 1)) throw std::invalid_argument("flip probability outside [0, 1]");
  if (shots < 0) throw std::invalid_argument("negative shot count");

  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> prep(probabilities.begin(), probabilities.end());
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const std::size_t n = probabilities.size();
  ShockReadout out;
  out.counts.assign(n, 0);
  std::size_t label = prep(rng);
  for (int s = 0; s < shots; ++s) {
    if (!persistent && s > 0) label = prep(rng);
    if (flip_prob > 0 && uni(rng) < flip_prob && n > 1) {
      if (label == 0)
        label = 1;
      else if (label == n - 1)
        label = n - 2;
      else
        label = uni(rng) < 0.5 ? label - 1 : label + 1;
      ++out.flips;
      out.survived = false;
    }
    ++out.counts[label];
  }
  return out;
}

double t1_survival(double t, double t1) {
  if (!(t1 > 0)) throw std::invalid_argument("T1 must be positive");
  return std::exp(-t / t1);
}

}  // namespace donorsim
