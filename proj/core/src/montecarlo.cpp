#include "dexp/montecarlo.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <thread>

#include "dexp/csv.hpp"
#include "dexp/rng.hpp"
#include "dexp/team.hpp"

namespace dexp {

ValidationReport validate(const SimConfig& c) {
  ValidationReport r;
  if (c.n_agents < 100) r.violations.push_back("n_agents must be at least 100");
  if (c.n_reps < 1000) r.violations.push_back("n_reps must be at least 1000");
  if (c.antithetic && c.n_reps % 2 != 0) r.violations.push_back("antithetic sampling needs an even n_reps");
  if (c.threads < 1) r.violations.push_back("threads must be at least 1");
  return r;
}

namespace {

struct Clearing {
  double mu_s, b, alpha, slope, intercept, denom;
};

Clearing clearing_for(const Equilibrium& eq) {
  const auto c = demand_coefficients(eq);
  const double denom = 1.0 - eq.b * c.slope;
  if (!(std::abs(denom) > 1e-12)) {
    throw Error(ErrorCode::DegenerateClearing, "clearing equation has no price term");
  }
  return {eq.params.mu_s, eq.b, c.alpha, c.slope, c.intercept, denom};
}

struct Draws {
  double V, S, eps_bar, ss;  // ss = sum (eps_i - eps_bar)^2
};

// eps is empty in sufficient-statistics mode; otherwise it holds every agent's
// noise and demands are evaluated agent by agent.
void fill_record(const Equilibrium& eq, const Clearing& cl, const Draws& d, const std::vector<double>& eps,
                 double n, SimRecord& rec) {
  const auto& prm = eq.params;
  rec.V = d.V;
  rec.S = d.S;
  rec.s_bar = d.V + d.eps_bar;
  rec.p = (-cl.mu_s - d.S + cl.b * (cl.alpha * rec.s_bar + cl.intercept)) / cl.denom;
  rec.D_bar = cl.alpha * rec.s_bar + cl.slope * rec.p + cl.intercept;
  rec.D_o = first_best_demand(prm, d.V, d.S);

  double spread = 0.0;   // sum (D_i - D_bar)^2
  double informed = 0.0; // sum delta/2 D_i^2, per agent
  const double delta = eq.tax.delta;
  if (eps.empty()) {
    // demands differ across agents only through alpha * (eps_i - eps_bar)
    spread = cl.alpha * cl.alpha * d.ss;
    rec.mean_sq = rec.D_bar * rec.D_bar + spread / n;
    informed = 0.5 * delta * rec.mean_sq;
  } else {
    double sq = 0.0;
    for (double e : eps) {
      const double di = demand(eq, d.V + e, rec.p);
      spread += (di - rec.D_bar) * (di - rec.D_bar);
      sq += di * di;
      informed += 0.5 * delta * di * di;
    }
    rec.mean_sq = sq / n;
    informed /= n;
  }
  rec.dispersion = spread / (n - 1.0);

  const double k = prm.beta + prm.gamma;
  rec.welfare = (prm.mu_s + d.S - 0.5 * prm.beta * rec.D_bar) * rec.D_bar + d.V * rec.D_bar -
                0.5 * prm.gamma * rec.mean_sq;
  const double fb = d.V + prm.mu_s + d.S;
  rec.welfare_fb = fb * fb / (2.0 * k);
  const double gap = rec.D_bar - rec.D_o;
  rec.loss = 0.5 * k * gap * gap + 0.5 * prm.gamma * rec.dispersion;

  const bool suppliers = eq.tax.regime == TaxRegime::BothSides;
  const double supplier_tax = suppliers ? 0.5 * delta * rec.D_bar * rec.D_bar : 0.0;
  rec.tax_paid = informed + supplier_tax;
  rec.rebate = 0.5 * delta * (rec.mean_sq + (suppliers ? rec.D_bar * rec.D_bar : 0.0));
}

void run_range(const Equilibrium& eq, const Clearing& cl, const SimConfig& cfg, std::uint64_t begin,
               std::uint64_t end, std::vector<SimRecord>& out) {
  const auto& prm = eq.params;
  const double n = static_cast<double>(cfg.n_agents);
  const double sd_v = 1.0 / std::sqrt(prm.tau0);
  const double sd_s = 1.0 / std::sqrt(prm.tau_s);
  const double sd_e = 1.0 / std::sqrt(prm.tau_eps);
  std::vector<double> eps;
  if (cfg.sampling == Sampling::PerAgent) eps.resize(cfg.n_agents);

  for (std::uint64_t rep = begin; rep < end; ++rep) {
    const std::uint64_t stream = cfg.antithetic ? rep / 2 : rep;
    const double sign = (cfg.antithetic && rep % 2 == 1) ? -1.0 : 1.0;
    Xoshiro256ss gen(cfg.seed, stream);
    boost::random::normal_distribution<double> unit(0.0, 1.0);

    Draws d{};
    d.V = sign * sd_v * unit(gen);
    d.S = sign * sd_s * unit(gen);
    if (cfg.sampling == Sampling::SufficientStatistics) {
      d.eps_bar = sign * sd_e / std::sqrt(n) * unit(gen);
      boost::random::chi_squared_distribution<double> chi(n - 1.0);
      d.ss = chi(gen) / prm.tau_eps;
    } else {
      double sum = 0.0;
      for (auto& e : eps) {
        e = sign * sd_e * unit(gen);
        sum += e;
      }
      d.eps_bar = sum / n;
      double ss = 0.0;
      for (double e : eps) ss += (e - d.eps_bar) * (e - d.eps_bar);
      d.ss = ss;
    }
    fill_record(eq, cl, d, eps, n, out[rep]);
  }
}

// Per-replication values are iid, or iid in antithetic pairs.
Estimate mean_estimate(const std::vector<double>& xs, bool paired) {
  std::vector<double> units;
  if (paired) {
    units.reserve(xs.size() / 2);
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) units.push_back(0.5 * (xs[i] + xs[i + 1]));
  } else {
    units = xs;
  }
  const double m = static_cast<double>(units.size());
  double mean = 0.0;
  for (double u : units) mean += u;
  mean /= m;
  double ss = 0.0;
  for (double u : units) ss += (u - mean) * (u - mean);
  return {mean, std::sqrt(ss / (m - 1.0) / m)};
}

}  // namespace

SimResult simulate_market(const Equilibrium& eq, const SimConfig& config) {
  auto report = validate(config);
  if (!report.ok()) throw Error(ErrorCode::InvalidInput, report.message());
  const auto cl = clearing_for(eq);

  SimResult res;
  res.params = eq.params;
  res.bias = eq.bias;
  res.tax = eq.tax;
  res.config = config;
  res.records.resize(config.n_reps);

  const unsigned threads = std::max(1u, config.threads);
  if (threads == 1) {
    run_range(eq, cl, config, 0, config.n_reps, res.records);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (config.n_reps + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint64_t b = std::min<std::uint64_t>(config.n_reps, t * chunk);
      const std::uint64_t e = std::min<std::uint64_t>(config.n_reps, b + chunk);
      if (b >= e) break;
      pool.emplace_back([&, b, e] { run_range(eq, cl, config, b, e, res.records); });
    }
    for (auto& th : pool) th.join();
  }

  res.summary.loss = mc_welfare_loss(res);
  res.summary.var_p = mc_price_variance(res);
  res.summary.max_budget_gap = budget_gap(res);
  return res;
}

Estimate mc_welfare_loss(const SimResult& result) {
  std::vector<double> xs;
  xs.reserve(result.records.size());
  for (const auto& r : result.records) xs.push_back(r.loss);
  return mean_estimate(xs, result.config.antithetic);
}

Estimate mc_price_variance(const SimResult& result) {
  double mean = 0.0;
  for (const auto& r : result.records) mean += r.p;
  mean /= static_cast<double>(result.records.size());
  std::vector<double> xs;
  xs.reserve(result.records.size());
  for (const auto& r : result.records) xs.push_back((r.p - mean) * (r.p - mean));
  auto est = mean_estimate(xs, result.config.antithetic);
  const double n = static_cast<double>(xs.size());
  est.estimate *= n / (n - 1.0);
  return est;
}

Estimate mc_posterior_check(const SimResult& result, const Equilibrium& eq) {
  const auto& recs = result.records;
  double sxx = 0.0;
  double sxv = 0.0;
  std::vector<double> x(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    x[i] = (recs[i].p - eq.A) / eq.B;
    sxx += x[i] * x[i];
    sxv += x[i] * recs[i].V;
  }
  const double slope = sxv / sxx;
  const double n = static_cast<double>(recs.size());
  // sandwich variance from the per-rep influence x (V - slope x) / mean(x^2)
  std::vector<double> psi(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) psi[i] = x[i] * (recs[i].V - slope * x[i]) / (sxx / n);
  auto inf = mean_estimate(psi, result.config.antithetic);
  return {slope, inf.standard_error};
}

PriceRegression mc_price_regression(const SimResult& result) {
  const auto& recs = result.records;
  const Eigen::Index n = static_cast<Eigen::Index>(recs.size());
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = recs[static_cast<std::size_t>(i)];
    X(i, 0) = 1.0;
    X(i, 1) = r.V;
    X(i, 2) = r.S;
    y(i) = r.p;
  }
  const Eigen::Matrix3d xtx = X.transpose() * X;
  const Eigen::Matrix3d inv = xtx.inverse();
  const Eigen::Vector3d coef = xtx.ldlt().solve(X.transpose() * y);
  const Eigen::VectorXd resid = y - X * coef;

  // cluster-robust meat; clusters are antithetic pairs or single reps
  Eigen::Matrix3d meat = Eigen::Matrix3d::Zero();
  const Eigen::Index step = result.config.antithetic ? 2 : 1;
  for (Eigen::Index i = 0; i + step <= n; i += step) {
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (Eigen::Index j = i; j < i + step; ++j) g += X.row(j).transpose() * resid(j);
    meat += g * g.transpose();
  }
  const Eigen::Matrix3d cov = inv * meat * inv;

  PriceRegression out;
  out.A = {coef(0), std::sqrt(cov(0, 0))};
  out.B = {coef(1), std::sqrt(cov(1, 1))};
  out.C = {-coef(2), std::sqrt(cov(2, 2))};
  return out;
}

double budget_gap(const SimResult& result) {
  double worst = 0.0;
  for (const auto& r : result.records) {
    worst = std::max(worst, std::abs(r.tax_paid - r.rebate) / std::max(1.0, std::abs(r.rebate)));
  }
  return worst;
}

std::string records_csv(const SimResult& result) {
  std::string out = csv::header({"rep", "V", "S", "s_bar", "p", "D_bar", "D_o", "dispersion", "mean_sq", "welfare",
                                 "welfare_fb", "loss", "tax_paid", "rebate"});
  std::size_t i = 0;
  for (const auto& r : result.records) {
    out += csv::row({static_cast<double>(i++), r.V, r.S, r.s_bar, r.p, r.D_bar, r.D_o, r.dispersion, r.mean_sq,
                     r.welfare, r.welfare_fb, r.loss, r.tax_paid, r.rebate});
  }
  return out;
}

}  // namespace dexp
