#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "qmd/config.hpp"

namespace qmd {

namespace {

using Json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string resolve_output(const std::string& path) {
  if (path.empty()) return path;
  const char* dir = std::getenv("QMD_OUTPUT_DIR");
  if (dir && *dir && path.front() != '/')
    return std::string(dir) + "/" + path;
  return path;
}

void emit(const RunConfig& cfg, const std::string& text) {
  const std::string path = resolve_output(cfg.output);
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

std::string run_analyze_channel(const RunConfig& cfg) {
  const MdEstimate est = md_certified_bound(*cfg.channel, cfg.epsilon);
  Json j;
  j["trace_lower_bound"] = est.trace_lower_bound;
  j["method"] = md_method_name(est.method);
  j["slack"] = est.slack;
  j["sample_count"] = est.sample_count;
  j["contraction_coefficient"] = md_contraction_coefficient(est);
  return j.dump(2) + "\n";
}

std::string run_simulate(const RunConfig& cfg) {
  MixingConfig mc;
  mc.samples = cfg.samples;
  mc.seed = cfg.seed;
  mc.threshold_r = cfg.threshold_r;
  mc.nesting = cfg.nesting;
  const MixingReport report = mixing_report(*cfg.schedule, cfg.n_max, mc);
  std::ostringstream out;
  out << "n,direction,diameter,md_product_bound,big_n,mu,two_mu_pow_bign,"
         "nesting\n";
  for (const MixingRow& row : report.rows) {
    out << row.n << ',' << direction_name(row.direction) << ','
        << fmt(row.diameter) << ',' << fmt(row.md_product_bound) << ','
        << row.big_n << ',' << fmt(row.mu) << ',' << fmt(row.two_mu_pow_bign)
        << ',' << (row.nesting ? nesting_name(*row.nesting) : "") << '\n';
  }
  return out.str();
}

std::string run_mps(const RunConfig& cfg) {
  const auto rows = mps_report(*cfg.train, *cfg.observable, cfg.n_max);
  std::ostringstream out;
  out << "n,phi_n,phi_infty_est,error_bar,converged\n";
  for (const MpsRow& row : rows)
    out << row.n << ',' << fmt(row.phi_n) << ',' << fmt(row.phi_infty_est)
        << ',' << fmt(row.error_bar) << ','
        << (row.converged ? "true" : "false") << '\n';
  return out.str();
}

std::string run_classical(const RunConfig& cfg) {
  const auto& mats = cfg.classical_matrices;
  const int dim = mats.front().dim();
  Eigen::RowVectorXd mu = Eigen::RowVectorXd::Constant(
      dim, 1.0 / static_cast<double>(dim));
  Eigen::MatrixXd product = Eigen::MatrixXd::Identity(dim, dim);
  std::ostringstream out;
  out << "k,delta,l1_consecutive\n";
  Eigen::RowVectorXd prev = mu;
  for (int k = 0; k <= cfg.n_max; ++k) {
    if (mats[k].dim() != dim)
      throw std::invalid_argument("classical matrices must share a dimension");
    product = product * mats[k].rows();
    const Eigen::RowVectorXd cur = mu * product;
    out << k << ',' << fmt(classical_dobrushin(StochasticMatrix(product))) << ','
        << fmt((cur - prev).cwiseAbs().sum()) << '\n';
    prev = cur;
  }
  return out.str();
}

std::string run_report(const RunConfig& cfg) {
  Json j;
  j["dim"] = cfg.schedule->dim();
  Json channels = Json::array();
  for (int n = 0; n <= cfg.n_max; ++n) {
    const double kappa = cfg.schedule->certified_kappa(n);
    Json c;
    c["n"] = n;
    c["trace_lower_bound"] = kappa;
    c["contraction_coefficient"] = std::min(1.0, std::max(0.0, 1.0 - kappa));
    channels.push_back(std::move(c));
  }
  j["channels"] = std::move(channels);

  MixingConfig mc;
  mc.samples = cfg.samples;
  mc.seed = cfg.seed;
  mc.threshold_r = cfg.threshold_r;
  mc.nesting = cfg.nesting;
  const MixingReport report = mixing_report(*cfg.schedule, cfg.n_max, mc);
  Json rows = Json::array();
  for (const MixingRow& row : report.rows) {
    Json r;
    r["n"] = row.n;
    r["direction"] = direction_name(row.direction);
    r["diameter"] = row.diameter;
    r["md_product_bound"] = row.md_product_bound;
    r["big_n"] = row.big_n;
    r["mu"] = row.mu;
    r["two_mu_pow_bign"] = row.two_mu_pow_bign;
    if (row.nesting) r["nesting"] = nesting_name(*row.nesting);
    rows.push_back(std::move(r));
  }
  j["mixing"] = std::move(rows);
  return j.dump(2) + "\n";
}

}  // namespace

int run(const RunConfig& cfg) {
  try {
    std::string text;
    if (cfg.command == "analyze-channel")
      text = run_analyze_channel(cfg);
    else if (cfg.command == "simulate")
      text = run_simulate(cfg);
    else if (cfg.command == "mps")
      text = run_mps(cfg);
    else if (cfg.command == "classical")
      text = run_classical(cfg);
    else
      text = run_report(cfg);
    emit(cfg, text);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

int run_from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config file: " << path << "\n";
    return 1;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return run(parse_config(buf.str()));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qmd
