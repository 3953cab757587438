#include "qmd/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <set>

#include "json.hpp"

namespace qmd {

namespace {

using Json = nlohmann::json;

void check_keys(const Json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : obj.items())
    if (!ok.count(item.key()))
      throw ConfigError(path + "/" + item.key(), "unknown field");
}

const Json& require(const Json& obj, const std::string& path, const char* key) {
  if (!obj.is_object() || !obj.contains(key))
    throw ConfigError(path + "/" + key, "missing required field");
  return obj.at(key);
}

double number_at(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

int int_at(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<int>();
}

std::uint64_t seed_at(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer seed");
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  const long long v = j.get<long long>();
  if (v < 0) throw ConfigError(path, "seed must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

std::string string_at(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

// Complex matrices serialize as nested arrays of [re, im] pairs.
Matrix parse_cmatrix(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a matrix");
  const int rows = static_cast<int>(j.size());
  int cols = -1;
  Matrix m;
  for (int r = 0; r < rows; ++r) {
    const Json& row = j.at(r);
    const std::string rpath = path + "/" + std::to_string(r);
    if (!row.is_array() || row.empty())
      throw ConfigError(rpath, "expected a matrix row");
    if (cols < 0) {
      cols = static_cast<int>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<int>(row.size()) != cols) {
      throw ConfigError(rpath, "ragged matrix rows");
    }
    for (int c = 0; c < cols; ++c) {
      const Json& e = row.at(c);
      const std::string epath = rpath + "/" + std::to_string(c);
      if (!e.is_array() || e.size() != 2)
        throw ConfigError(epath, "expected a [re, im] pair");
      m(r, c) = Complex(number_at(e.at(0), epath + "/0"),
                        number_at(e.at(1), epath + "/1"));
    }
  }
  return m;
}

Eigen::MatrixXd parse_rmatrix(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a matrix");
  const int rows = static_cast<int>(j.size());
  int cols = -1;
  Eigen::MatrixXd m;
  for (int r = 0; r < rows; ++r) {
    const Json& row = j.at(r);
    const std::string rpath = path + "/" + std::to_string(r);
    if (!row.is_array() || row.empty())
      throw ConfigError(rpath, "expected a matrix row");
    if (cols < 0) {
      cols = static_cast<int>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<int>(row.size()) != cols) {
      throw ConfigError(rpath, "ragged matrix rows");
    }
    for (int c = 0; c < cols; ++c)
      m(r, c) = number_at(row.at(c), rpath + "/" + std::to_string(c));
  }
  return m;
}

KrausChannel parse_channel(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected a channel object");
  const std::string kind = string_at(require(j, path, "kind"), path + "/kind");
  try {
    if (kind == "kraus") {
      check_keys(j, path, {"kind", "matrices"});
      const Json& mats = require(j, path, "matrices");
      if (!mats.is_array() || mats.empty())
        throw ConfigError(path + "/matrices", "expected a list of matrices");
      std::vector<Matrix> kraus;
      for (std::size_t i = 0; i < mats.size(); ++i)
        kraus.push_back(
            parse_cmatrix(mats.at(i), path + "/matrices/" + std::to_string(i)));
      return KrausChannel(std::move(kraus));
    }
    if (kind == "depolarizing") {
      check_keys(j, path, {"kind", "dim", "p"});
      return depolarizing_channel(int_at(require(j, path, "dim"), path + "/dim"),
                                  number_at(require(j, path, "p"), path + "/p"));
    }
    if (kind == "unitary") {
      check_keys(j, path, {"kind", "matrix"});
      return unitary_channel(
          parse_cmatrix(require(j, path, "matrix"), path + "/matrix"));
    }
    if (kind == "replace") {
      check_keys(j, path, {"kind", "state"});
      return replace_channel(DensityOperator(
          parse_cmatrix(require(j, path, "state"), path + "/state")));
    }
    if (kind == "haar") {
      check_keys(j, path, {"kind", "dim", "kraus_count", "seed"});
      return haar_random_channel(
          int_at(require(j, path, "dim"), path + "/dim"),
          int_at(require(j, path, "kraus_count"), path + "/kraus_count"),
          seed_at(require(j, path, "seed"), path + "/seed"));
    }
    if (kind == "classical") {
      check_keys(j, path, {"kind", "rows"});
      return embed_classical(StochasticMatrix(
          parse_rmatrix(require(j, path, "rows"), path + "/rows")));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path + "/kind", "unknown channel kind '" + kind + "'");
}

ProcessSchedule parse_schedule(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected a schedule object");
  if (j.contains("preset")) {
    check_keys(j, path, {"preset"});
    const std::string name = string_at(j.at("preset"), path + "/preset");
    if (name == "example-exp1")
      return ProcessSchedule::generated(2, "exp1", 0);
    if (name == "example-oscillation")
      return ProcessSchedule::generated(2, "oscillation", 0);
    throw ConfigError(path + "/preset", "unknown preset '" + name + "'");
  }
  const std::string kind = string_at(require(j, path, "kind"), path + "/kind");
  try {
    if (kind == "explicit" || kind == "periodic") {
      check_keys(j, path, {"kind", "channels"});
      const Json& chans = require(j, path, "channels");
      if (!chans.is_array() || chans.empty())
        throw ConfigError(path + "/channels", "expected a list of channels");
      std::vector<KrausChannel> list;
      for (std::size_t i = 0; i < chans.size(); ++i)
        list.push_back(
            parse_channel(chans.at(i), path + "/channels/" + std::to_string(i)));
      return kind == "explicit" ? ProcessSchedule::explicit_list(std::move(list))
                                : ProcessSchedule::periodic(std::move(list));
    }
    if (kind == "generated") {
      check_keys(j, path, {"kind", "dim", "rule", "seed", "params"});
      std::map<std::string, double> params;
      if (j.contains("params")) {
        const Json& p = j.at("params");
        if (!p.is_object())
          throw ConfigError(path + "/params", "expected an object");
        for (const auto& item : p.items())
          params[item.key()] =
              number_at(item.value(), path + "/params/" + item.key());
      }
      return ProcessSchedule::generated(
          int_at(require(j, path, "dim"), path + "/dim"),
          string_at(require(j, path, "rule"), path + "/rule"),
          seed_at(require(j, path, "seed"), path + "/seed"), std::move(params));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path + "/kind", "unknown schedule kind '" + kind + "'");
}

MpsTensorTrain parse_train(const Json& cfg, int n_max, const std::string& root) {
  const int bond = int_at(require(cfg, root, "bond_dim"), root + "/bond_dim");
  const int phys = int_at(require(cfg, root, "phys_dim"), root + "/phys_dim");
  if (bond < 1) throw ConfigError(root + "/bond_dim", "must be >= 1");
  if (phys < 1) throw ConfigError(root + "/phys_dim", "must be >= 1");
  const Json& sites = require(cfg, root, "sites");
  const std::string spath = root + "/sites";
  try {
    if (sites.is_object()) {
      check_keys(sites, spath, {"random"});
      const Json& rnd = require(sites, spath, "random");
      check_keys(rnd, spath + "/random", {"seed", "n", "beta"});
      const int n = int_at(require(rnd, spath + "/random", "n"),
                           spath + "/random/n");
      double beta = 0.0;
      if (rnd.contains("beta"))
        beta = number_at(rnd.at("beta"), spath + "/random/beta");
      if (n < n_max)
        throw ConfigError(spath + "/random/n", "train shorter than n_max");
      return random_gauged_train(
          bond, phys, n,
          seed_at(require(rnd, spath + "/random", "seed"),
                  spath + "/random/seed"),
          beta);
    }
    if (!sites.is_array() || sites.empty())
      throw ConfigError(spath, "expected a site list or {\"random\": ...}");
    if (static_cast<int>(sites.size()) < n_max)
      throw ConfigError(spath, "train shorter than n_max");
    std::vector<std::vector<Matrix>> raw;
    for (std::size_t k = 0; k < sites.size(); ++k) {
      const Json& site = sites.at(k);
      const std::string kpath = spath + "/" + std::to_string(k);
      if (!site.is_array() || static_cast<int>(site.size()) != phys)
        throw ConfigError(kpath, "expected phys_dim tensors");
      std::vector<Matrix> tensors;
      for (std::size_t i = 0; i < site.size(); ++i) {
        Matrix a = parse_cmatrix(site.at(i), kpath + "/" + std::to_string(i));
        if (a.rows() != bond || a.cols() != bond)
          throw ConfigError(kpath + "/" + std::to_string(i),
                            "tensor must be bond_dim x bond_dim");
        tensors.push_back(std::move(a));
      }
      raw.push_back(std::move(tensors));
    }
    return MpsTensorTrain::gauge_fix(std::move(raw));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(spath, e.what());
  }
}

LocalObservable parse_observable(const Json& j, const std::string& path,
                                 const MpsTensorTrain& train) {
  if (!j.is_object()) throw ConfigError(path, "expected an observable object");
  check_keys(j, path, {"window", "matrix"});
  const Json& w = require(j, path, "window");
  if (!w.is_array() || w.size() != 2)
    throw ConfigError(path + "/window", "expected [first, last]");
  LocalObservable x;
  x.first = int_at(w.at(0), path + "/window/0");
  x.last = int_at(w.at(1), path + "/window/1");
  x.matrix = parse_cmatrix(require(j, path, "matrix"), path + "/matrix");
  if ((x.matrix - x.matrix.adjoint()).norm() >
      1e-10 * std::max(1.0, x.matrix.norm()))
    throw ConfigError(path + "/matrix", "observable must be Hermitian");
  try {
    if (x.first < 1 || x.last < x.first || x.last > train.length())
      throw ConfigError(path + "/window", "window out of range");
    std::size_t dim = 1;
    for (int k = x.first; k <= x.last; ++k)
      dim *= static_cast<std::size_t>(train.phys_dim(k));
    if (static_cast<std::size_t>(x.matrix.rows()) != dim)
      throw ConfigError(path + "/matrix",
                        "matrix dimension does not match the window");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  return x;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");

  RunConfig cfg;
  cfg.command = string_at(require(doc, "", "command"), "/command");
  const bool needs_schedule =
      cfg.command == "simulate" || cfg.command == "report";
  if (cfg.command != "analyze-channel" && !needs_schedule &&
      cfg.command != "mps" && cfg.command != "classical")
    throw ConfigError("/command", "unknown command '" + cfg.command + "'");

  check_keys(doc, "",
             {"command", "seed", "n_max", "samples", "threshold_r", "epsilon",
              "nesting", "output", "format", "channel", "schedule", "matrices",
              "bond_dim", "phys_dim", "sites", "observable"});

  if (doc.contains("n_max")) cfg.n_max = int_at(doc.at("n_max"), "/n_max");
  if (cfg.n_max < 1) throw ConfigError("/n_max", "must be >= 1");
  if (doc.contains("samples"))
    cfg.samples = int_at(doc.at("samples"), "/samples");
  if (cfg.samples < 1) throw ConfigError("/samples", "must be >= 1");
  if (doc.contains("threshold_r"))
    cfg.threshold_r = number_at(doc.at("threshold_r"), "/threshold_r");
  if (!(cfg.threshold_r > 0.0 && cfg.threshold_r < 1.0))
    throw ConfigError("/threshold_r", "must lie in (0,1)");
  if (doc.contains("epsilon"))
    cfg.epsilon = number_at(doc.at("epsilon"), "/epsilon");
  if (!(cfg.epsilon > 0.0)) throw ConfigError("/epsilon", "must be positive");
  if (doc.contains("nesting")) {
    if (!doc.at("nesting").is_boolean())
      throw ConfigError("/nesting", "expected a boolean");
    cfg.nesting = doc.at("nesting").get<bool>();
  }
  if (doc.contains("output"))
    cfg.output = string_at(doc.at("output"), "/output");

  const bool stochastic = needs_schedule;
  if (doc.contains("seed")) {
    cfg.seed = seed_at(doc.at("seed"), "/seed");
  } else if (stochastic) {
    throw ConfigError("/seed", "seed required for stochastic commands");
  }

  const std::string natural =
      (cfg.command == "analyze-channel" || cfg.command == "report") ? "json"
                                                                    : "csv";
  cfg.format = natural;
  if (doc.contains("format")) {
    const std::string f = string_at(doc.at("format"), "/format");
    if (f != "csv" && f != "json")
      throw ConfigError("/format", "expected 'csv' or 'json'");
    if (f != natural)
      throw ConfigError("/format", "command '" + cfg.command + "' emits " +
                                       natural);
  }

  if (cfg.command == "analyze-channel") {
    cfg.channel = parse_channel(require(doc, "", "channel"), "/channel");
  } else if (needs_schedule) {
    cfg.schedule = parse_schedule(require(doc, "", "schedule"), "/schedule");
  } else if (cfg.command == "classical") {
    const Json& sched = require(doc, "", "schedule");
    if (sched.is_object() && sched.contains("preset")) {
      check_keys(sched, "/schedule", {"preset"});
      const std::string name =
          string_at(sched.at("preset"), "/schedule/preset");
      if (name != "example-exp1")
        throw ConfigError("/schedule/preset",
                          "unknown classical preset '" + name + "'");
      for (int k = 0; k <= cfg.n_max; ++k)
        cfg.classical_matrices.emplace_back(exp1_stochastic(k));
    } else {
      if (!sched.is_object())
        throw ConfigError("/schedule", "expected a schedule object");
      check_keys(sched, "/schedule", {"matrices"});
      const Json& mats = require(sched, "/schedule", "matrices");
      if (!mats.is_array() || mats.empty())
        throw ConfigError("/schedule/matrices", "expected a list");
      for (std::size_t i = 0; i < mats.size(); ++i) {
        const std::string mpath = "/schedule/matrices/" + std::to_string(i);
        const Json& entry = mats.at(i);
        if (!entry.is_object())
          throw ConfigError(mpath, "expected an object with 'rows'");
        check_keys(entry, mpath, {"rows"});
        Eigen::MatrixXd rows =
            parse_rmatrix(require(entry, mpath, "rows"), mpath + "/rows");
        for (int r = 0; r < rows.rows(); ++r)
          if (std::abs(rows.row(r).sum() - 1.0) > 1e-12 ||
              rows.row(r).minCoeff() < -1e-15)
            throw ConfigError(mpath + "/rows/" + std::to_string(r),
                              "row is not a probability distribution");
        cfg.classical_matrices.emplace_back(std::move(rows));
      }
      if (static_cast<int>(cfg.classical_matrices.size()) < cfg.n_max + 1)
        throw ConfigError("/schedule/matrices",
                          "need n_max + 1 stochastic matrices");
    }
  } else {  // mps
    cfg.train = parse_train(doc, cfg.n_max, "");
    cfg.observable =
        parse_observable(require(doc, "", "observable"), "/observable",
                         *cfg.train);
    if (cfg.n_max < cfg.observable->last)
      throw ConfigError("/n_max", "n_max precedes the observable window end");
  }
  return cfg;
}

}  // namespace qmd
