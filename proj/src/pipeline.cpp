#include "kdvbvp/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "kdvbvp/error.hpp"

namespace kdvbvp {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

constexpr double kMeasureTol = 1e-9;
constexpr double kRoundtripTol = 1e-8;
constexpr double kSpectrumTol = 1e-8;
constexpr double kCollisionTol = 1e-12;

}  // namespace

std::pair<double, double> seed_bracket(const SolitonData& seed, double kappa, double T) {
  const JostValue lo = jost_plus(seed, T, kappa);
  const JostValue hi = jost_plus(seed, T, -kappa);
  return {lo.derivative / lo.value, hi.derivative / hi.value};
}

ProblemConfig ProblemConfig::create(SpectralSetup setup, double mu_lower, SolitonData seed, double w0) {
  const double mu_star = setup.mu_star();
  if (!(mu_lower > mu_star && mu_lower < 0.0)) {
    throw Error(ErrorCode::config_invalid, "mu_lower = " + fmt(mu_lower) + " must lie in (mu_star, 0) = (" +
                                               fmt(mu_star) + ", 0)");
  }
  const double kappa_lower = std::sqrt(-mu_lower);
  for (const auto& sol : seed.solitons()) {
    if (!(sol.kappa < kappa_lower)) {
      throw Error(ErrorCode::config_invalid, "seed eigenvalue parameter kappa = " + fmt(sol.kappa) +
                                                 " must be below sqrt(-mu_lower) = " + fmt(kappa_lower));
    }
  }
  if (!std::isfinite(w0)) throw Error(ErrorCode::config_invalid, "w0 must be finite");

  ProblemConfig cfg;
  cfg.mu_lower_ = mu_lower;
  cfg.kappa_lower_ = kappa_lower;
  cfg.seed_ = std::move(seed);
  cfg.w0_ = w0;

  const double ks = setup.kappa_star_upper();
  const auto [lo, hi] = seed_bracket(cfg.seed_, ks, 0.0);
  if (!(w0 > lo && w0 < hi)) {
    throw Error(ErrorCode::w0_out_of_bracket,
                "w0 = " + fmt(w0) + " is outside the open bracket (" + fmt(lo) + ", " + fmt(hi) + ")");
  }
  // z(0) = 1, z'(0) = w0 in the basis y1 = e^+(t, i kappa^*), y2 = e^+(t, -i kappa^*).
  const JostValue y1 = jost_plus(cfg.seed_, 0.0, ks);
  const JostValue y2 = jost_plus(cfg.seed_, 0.0, -ks);
  const double wr = y1.value * y2.derivative - y1.derivative * y2.value;
  cfg.A_ = (y2.derivative - w0 * y2.value) / wr;
  cfg.B_ = (w0 * y1.value - y1.derivative) / wr;
  cfg.setup_ = std::move(setup);
  return cfg;
}

RiccatiValue riccati_w(const ProblemConfig& cfg, double T) {
  const double ks = cfg.setup().kappa_star_upper();
  const JostValue y1 = jost_plus(cfg.seed(), T, ks);
  const JostValue y2 = jost_plus(cfg.seed(), T, -ks);
  RiccatiValue out;
  const double z = cfg.coeff_A() * y1.value + cfg.coeff_B() * y2.value;
  out.w = (cfg.coeff_A() * y1.derivative + cfg.coeff_B() * y2.derivative) / z;
  out.lower = y1.derivative / y1.value;
  out.upper = y2.derivative / y2.value;
  if (!(z > 0.0) || !(out.w > out.lower && out.w < out.upper)) {
    throw Error(ErrorCode::bracket_violation, "w(" + fmt(T) + ") = " + fmt(out.w) + " left the bracket (" +
                                                  fmt(out.lower) + ", " + fmt(out.upper) + ")");
  }
  return out;
}

DiscreteWeylFunction measure_transform(const ProblemConfig& cfg, double T) {
  return measure_transform(cfg, T, riccati_w(cfg, T));
}

DiscreteWeylFunction measure_transform(const ProblemConfig& cfg, double T, const RiccatiValue& w) {
  const SpectralSetup& S = cfg.setup();
  const Dispersion& D = S.dispersion();
  const int s = S.s();
  const DiscreteWeylFunction M = weyl_function(shift(cfg.seed(), T));

  std::vector<WeylPole> poles;
  auto add = [&](double xi, double weight, const std::string& origin) {
    if (!(weight > 0.0) || !std::isfinite(weight)) {
      throw Error(ErrorCode::nonpositive_weight, "weight " + fmt(weight) + " at xi = " + fmt(xi) + " (" +
                                                     origin + ", T = " + fmt(T) + ")");
    }
    poles.push_back({xi, weight});
  };

  // Each seed pole eta contributes the 2s+1 solutions of Phi(xi) = eta, with the residue of
  // M(phi(rho))/g(rho^2) at rho = i xi.
  for (const auto& p : M.poles()) {
    const auto xi = S.xi_roots(p.xi);
    for (int j = -s; j <= s; ++j) {
      const double x = xi[static_cast<size_t>(j + s)];
      add(x, p.weight / (D.dPhi(x) * S.g(-x * x)), "seed pole " + fmt(p.xi) + ", branch " + std::to_string(j));
    }
  }
  // Zeros of g(rho^2) at rho = +-i gamma_v, where Phi(+-gamma_v) = +-(-1)^{v-1} kappa^*.
  for (int v = 1; v <= s; ++v) {
    const double gm = S.gamma()[static_cast<size_t>(v) - 1];
    const double cv = S.roots().c[static_cast<size_t>(v) - 1];
    const double sgn = (v % 2 == 1) ? 1.0 : -1.0;
    const double den = 2.0 * gm * S.g_prime(cv);
    const double ks = S.kappa_star_upper();
    add(gm, (w.w - M.on_axis(sgn * ks)) / den, "gamma_" + std::to_string(v));
    add(-gm, -(w.w - M.on_axis(-sgn * ks)) / den, "-gamma_" + std::to_string(v));
  }

  std::sort(poles.begin(), poles.end(), [](const WeylPole& a, const WeylPole& b) { return a.xi < b.xi; });
  for (size_t i = 1; i < poles.size(); ++i) {
    if (poles[i].xi - poles[i - 1].xi <= kCollisionTol * std::max(1.0, std::abs(poles[i].xi))) {
      throw Error(ErrorCode::pole_collision, "poles collide at xi = " + fmt(poles[i].xi) + " (T = " + fmt(T) + ")");
    }
  }
  DiscreteWeylFunction m(std::move(poles));

  // Consistency gate against the defining quotient at fixed off-axis sample points.
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> radius(0.2, 3.0);
  std::uniform_real_distribution<double> angle(0.15, 1.42);
  const double scale = std::max(1.0, S.gamma_prime().back());
  for (int k = 0; k < 20; ++k) {
    const double r = radius(rng) * scale;
    double th = angle(rng);
    if (k % 2) th = std::numbers::pi - th;
    if (k % 4 >= 2) th = -th;
    const std::complex<double> rho = std::polar(r, th);
    const std::complex<double> expected = (M(D.phi(rho)) - w.w) / S.g(rho * rho);
    const std::complex<double> got = m(rho);
    if (std::abs(got - expected) > kMeasureTol * std::max(std::abs(expected), 1e-300)) {
      throw Error(ErrorCode::glue_mismatch, "measure disagrees with (M(phi) - w)/g at |rho| = " + fmt(r) +
                                                ", relative error " +
                                                fmt(std::abs(got - expected) / std::abs(expected)));
    }
  }
  return m;
}

std::vector<NormingConstant> EvolvedSpectrum::alphas_at(double T) const {
  std::vector<NormingConstant> out = alphas_at_0;
  for (size_t k = 0; k < out.size(); ++k) out[k].alpha *= std::exp(rates[k] * T);
  return out;
}

EvolvedSpectrum evolve_spectrum(const ProblemConfig& cfg) {
  const SpectralSetup& S = cfg.setup();
  EvolvedSpectrum es;
  if (!cfg.seed().empty()) {
    const auto seed_m = weyl_function(cfg.seed());
    const auto seed_cls = classify(seed_m);
    for (double k : seed_cls.lambda1) {
      for (double xi : S.xi_roots(k)) es.lambda1.push_back(std::abs(xi));
    }
    for (double k : seed_cls.lambda2) {
      for (double xi : S.xi_roots(k)) es.lambda2.push_back(std::abs(xi));
    }
  }
  for (double d : S.dispersion().delta()) es.lambda1.push_back(d);
  for (double g : S.gamma()) es.lambda2.push_back(g);
  std::sort(es.lambda1.begin(), es.lambda1.end());
  std::sort(es.lambda2.begin(), es.lambda2.end());

  const auto m0 = measure_transform(cfg, 0.0);
  const auto cls = classify(m0);
  auto same = [](const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
      if (std::abs(a[i] - b[i]) > kSpectrumTol * std::max(1.0, a[i])) return false;
    }
    return true;
  };
  if (!same(es.lambda1, cls.lambda1) || !same(es.lambda2, cls.lambda2)) {
    throw Error(ErrorCode::classification_failure,
                "spectrum of the T = 0 measure does not match the prediction from the seed");
  }
  es.alphas_at_0 = alphas(m0, cls);
  for (const auto& a : es.alphas_at_0) es.rates.push_back(-2.0 * S.dispersion().Phi(a.kappa));
  return es;
}

SolitonData reconstruct_q(const DiscreteWeylFunction& measure) {
  const auto cls = classify(measure);
  SolitonData data = from_alphas(alphas(measure, cls), false);
  const auto back = weyl_function(data);
  bool ok = back.size() == measure.size();
  for (int k = 0; ok && k < back.size(); ++k) {
    const auto& a = back.poles()[static_cast<size_t>(k)];
    const auto& b = measure.poles()[static_cast<size_t>(k)];
    ok = std::abs(a.xi - b.xi) <= kRoundtripTol * std::max(1.0, std::abs(b.xi)) &&
         std::abs(a.weight - b.weight) <= kRoundtripTol * b.weight;
  }
  if (!ok) {
    throw Error(ErrorCode::roundtrip_failure, "Weyl function of the reconstructed potential differs from the measure");
  }
  return data;
}

SolitonData reconstruct_q(const ProblemConfig& cfg, double T) { return reconstruct_q(measure_transform(cfg, T)); }

SolitonData evolve_data(const EvolvedSpectrum& spectrum, double T) {
  return from_alphas(spectrum.alphas_at(T), false);
}

int default_jet_order(int s) { return std::max(2 * s + 3, 5); }

SolutionField solve(const ProblemConfig& cfg, const std::vector<double>& t_grid,
                    const std::vector<double>& x_grid, int jet_order) {
  if (t_grid.empty()) throw Error(ErrorCode::config_invalid, "t grid is empty");
  const int order = jet_order > 0 ? jet_order : default_jet_order(cfg.s());
  if (order < 2 * cfg.s() + 1) {
    throw Error(ErrorCode::jet_too_short, "jet order " + std::to_string(order) + " is below 2s+1");
  }
  SolutionField field;
  field.C = cfg.setup().coefficients().C;
  field.a = cfg.setup().a();
  field.t_grid = t_grid;
  field.x_grid = x_grid;
  field.expected_pole_count = cfg.expected_pole_count();
  field.slices.resize(t_grid.size());

  std::vector<std::exception_ptr> errors(t_grid.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < t_grid.size(); i = next++) {
      try {
        SolutionSlice& sl = field.slices[i];
        sl.t = t_grid[i];
        sl.w = riccati_w(cfg, sl.t);
        sl.measure = measure_transform(cfg, sl.t, sl.w);
        const SolitonData data = reconstruct_q(sl.measure);
        sl.jets.reserve(x_grid.size());
        for (double x : x_grid) sl.jets.push_back(potential_jet(data, x, order));
        sl.origin = potential_jet(data, 0.0, order);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const size_t n_threads =
      std::min<size_t>(t_grid.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (size_t k = 1; k < n_threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return field;
}

}  // namespace kdvbvp
