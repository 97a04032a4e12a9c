// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ppcloud/experiments/schedule.hpp"

namespace ppcloud {

/// One experiment run. Field names match the JSON keys.
struct ExperimentConfig {
  std::string scenario;                 ///< chernoff | decay | components | compactness
  double gamma = 1.0;
  int d = 2;
  double beta = 0.5;
  std::vector<double> epsilons;         ///< decreasing
  std::vector<double> kappas{0.5};
  std::vector<double> alphas{0.05, 0.1, 0.2, 0.4};
  double p = 2.0;
  std::vector<double> qs{1.5};          ///< "q": number or list
  int trials = 50;
  std::uint64_t seed = 1;
  std::string outdir = "out";
  unsigned threads = 1;
  std::string target = "linear";        ///< constant | linear | sin
  double noise = 0.0;                   ///< perturbation amplitude in units of s(eps)
  double coarse_divisor = 0.0;          ///< 0 selects 4 sqrt(d)
  double margin = -1.0;                 ///< dilation of Q; negative selects 2 s(eps_max)
  std::vector<double> region_lo{-0.5, -0.5};
  std::vector<double> region_hi{0.5, 0.5};
  std::vector<double> ratios{4, 6, 8};  ///< chernoff: s / eps
  int boxes_per_side = 100;             ///< chernoff: boxes per axis of each cloud
  double raster_divisor = 8.0;          ///< raster pitch eps / raster_divisor
  double max_expected_points = 1e8;

  ScaleSchedule schedule() const { return ScaleSchedule{beta, d, coarse_divisor}; }

  void validate() const {
    static const char* names[] = {"chernoff", "decay", "components", "compactness"};
    bool known = false;
    for (const char* n : names) known |= scenario == n;
    if (!known) throw std::invalid_argument("config: unknown scenario '" + scenario + "'");
    if (!(gamma > 0.0)) throw std::invalid_argument("config: gamma must be > 0");
    if (d < 1 || d > 3) throw std::invalid_argument("config: d must be 1..3");
    schedule().validate();
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    for (double k : kappas)
      if (!(k > 0.0 && k < 1.0)) throw std::invalid_argument("config: kappa must be in (0,1)");
    for (double a : alphas)
      if (!(a > 0.0)) throw std::invalid_argument("config: alpha must be > 0");
    for (double q : qs)
      if (!(q >= 1.0 && q < p)) throw std::invalid_argument("config: need 1 <= q < p");
    if (scenario != "chernoff") {
      if (epsilons.empty()) throw std::invalid_argument("config: epsilons must be nonempty");
      for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0 && epsilons[i] < 1.0)) throw std::invalid_argument("config: need 0 < epsilon < 1");
        if (i && !(epsilons[i] < epsilons[i - 1])) throw std::invalid_argument("config: epsilons must decrease");
      }
    }
    if (static_cast<int>(region_lo.size()) != d || static_cast<int>(region_hi.size()) != d)
      throw std::invalid_argument("config: region_lo/region_hi must have d entries");
    if (target != "constant" && target != "linear" && target != "sin")
      throw std::invalid_argument("config: target must be constant, linear or sin");
    if (!(noise >= 0.0)) throw std::invalid_argument("config: noise must be >= 0");
    if (ratios.empty() || boxes_per_side < 1) throw std::invalid_argument("config: bad chernoff grid");
    for (double r : ratios)
      if (!(r > 0.0)) throw std::invalid_argument("config: ratios must be > 0");
    if (!(raster_divisor >= 8.0)) throw std::invalid_argument("config: raster_divisor must be >= 8");
  }
};

namespace detail {

template <class T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  static const char* known[] = {"scenario", "gamma", "d", "beta", "epsilons", "kappas", "alphas", "p", "q",
                                "trials", "seed", "outdir", "threads", "target", "noise", "coarse_divisor",
                                "margin", "region_lo", "region_hi", "ratios", "boxes_per_side",
                                "raster_divisor", "max_expected_points"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok |= item.key() == k;
    if (!ok) throw std::invalid_argument("config: unknown key '" + item.key() + "'");
  }
  ExperimentConfig c;
  j.at("scenario").get_to(c.scenario);
  detail::read_opt(j, "gamma", c.gamma);
  detail::read_opt(j, "d", c.d);
  c.region_lo.assign(c.d, -0.5);
  c.region_hi.assign(c.d, 0.5);
  detail::read_opt(j, "beta", c.beta);
  detail::read_opt(j, "epsilons", c.epsilons);
  detail::read_opt(j, "kappas", c.kappas);
  detail::read_opt(j, "alphas", c.alphas);
  detail::read_opt(j, "p", c.p);
  if (j.contains("q")) {
    if (j.at("q").is_array()) j.at("q").get_to(c.qs);
    else c.qs = {j.at("q").get<double>()};
  }
  detail::read_opt(j, "trials", c.trials);
  detail::read_opt(j, "seed", c.seed);
  detail::read_opt(j, "outdir", c.outdir);
  detail::read_opt(j, "threads", c.threads);
  detail::read_opt(j, "target", c.target);
  detail::read_opt(j, "noise", c.noise);
  detail::read_opt(j, "coarse_divisor", c.coarse_divisor);
  detail::read_opt(j, "margin", c.margin);
  detail::read_opt(j, "region_lo", c.region_lo);
  detail::read_opt(j, "region_hi", c.region_hi);
  detail::read_opt(j, "ratios", c.ratios);
  detail::read_opt(j, "boxes_per_side", c.boxes_per_side);
  detail::read_opt(j, "raster_divisor", c.raster_divisor);
  detail::read_opt(j, "max_expected_points", c.max_expected_points);
  if (c.threads == 0) c.threads = 1;
  c.validate();
  return c;
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  return nlohmann::json{{"scenario", c.scenario}, {"gamma", c.gamma}, {"d", c.d}, {"beta", c.beta},
                        {"epsilons", c.epsilons}, {"kappas", c.kappas}, {"alphas", c.alphas}, {"p", c.p},
                        {"q", c.qs}, {"trials", c.trials}, {"seed", c.seed}, {"outdir", c.outdir},
                        {"threads", c.threads}, {"target", c.target}, {"noise", c.noise},
                        {"coarse_divisor", c.coarse_divisor}, {"margin", c.margin},
                        {"region_lo", c.region_lo}, {"region_hi", c.region_hi}, {"ratios", c.ratios},
                        {"boxes_per_side", c.boxes_per_side}, {"raster_divisor", c.raster_divisor},
                        {"max_expected_points", c.max_expected_points}};
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return config_from_json(nlohmann::json::parse(in));
}

/// FNV-1a 64 of the canonical JSON rendering, excluding keys that do not
/// affect the produced rows (threads, outdir).
inline std::uint64_t config_hash(const ExperimentConfig& c) {
  auto j = config_to_json(c);
  j.erase("threads");
  j.erase("outdir");
  const std::string text = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace ppcloud
