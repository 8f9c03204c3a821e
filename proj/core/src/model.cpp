#include "dexp/model.hpp"

#include <cmath>
#include <sstream>

namespace dexp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegeneratePricing: return "DegeneratePricing";
    case ErrorCode::MultipleRoots: return "MultipleRoots";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::DegenerateClearing: return "DegenerateClearing";
  }
  return "Unknown";
}

std::string_view to_string(TaxRegime regime) {
  return regime == TaxRegime::BothSides ? "both" : "informed";
}

TaxRegime parse_regime(std::string_view text) {
  if (text == "both" || text == "BothSides") return TaxRegime::BothSides;
  if (text == "informed" || text == "InformedOnly") return TaxRegime::InformedOnly;
  throw Error(ErrorCode::InvalidInput, "unknown tax regime '" + std::string(text) + "'");
}

std::string ValidationReport::message() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "; ";
    out << violations[i];
  }
  return out.str();
}

namespace {

void require_positive(std::vector<std::string>& out, double value, const char* name) {
  if (!std::isfinite(value) || !(value > 0.0)) {
    out.push_back(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

ValidationReport validate(const MarketParams& params, const Bias& bias, const TaxSpec& tax) {
  ValidationReport report;
  auto& v = report.violations;
  require_positive(v, params.gamma, "gamma");
  require_positive(v, params.beta, "beta");
  require_positive(v, params.tau0, "tau0");
  require_positive(v, params.tau_eps, "tau_eps");
  require_positive(v, params.tau_s, "tauS");
  if (!std::isfinite(params.mu_s)) v.push_back("muS must be finite");

  if (!std::isfinite(bias.theta) || !(bias.theta > -1.0)) {
    v.push_back("theta must exceed -1");
  }

  if (!std::isfinite(tax.delta)) {
    v.push_back("delta must be finite");
  } else {
    if (!(tax.delta > -params.gamma)) v.push_back("delta must exceed -gamma");
    if (tax.regime == TaxRegime::BothSides && !(tax.delta > -params.beta)) {
      v.push_back("delta must exceed -beta");
    }
  }
  return report;
}

ValidationReport validate(const SolverSettings& settings) {
  ValidationReport report;
  auto& v = report.violations;
  if (!(settings.abs_tol > 0.0)) v.push_back("abs_tol must be positive");
  if (!(settings.rel_tol > 0.0)) v.push_back("rel_tol must be positive");
  if (settings.max_iter < 1) v.push_back("max_iter must be at least 1");
  if (settings.scan_points < 16) v.push_back("scan_points must be at least 16");
  return report;
}

void require_valid(const MarketParams& params, const Bias& bias, const TaxSpec& tax) {
  auto report = validate(params, bias, tax);
  if (!report.ok()) throw Error(ErrorCode::InvalidInput, report.message());
}

}  // namespace dexp
