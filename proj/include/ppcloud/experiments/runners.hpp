// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ppcloud/bad_boxes.hpp"
#include "ppcloud/bounds.hpp"
#include "ppcloud/energy.hpp"
#include "ppcloud/errors.hpp"
#include "ppcloud/experiments/config.hpp"
#include "ppcloud/experiments/csv.hpp"
#include "ppcloud/extension.hpp"
#include "ppcloud/parallel.hpp"
#include "ppcloud/point_process.hpp"
#include "ppcloud/regularity.hpp"

namespace ppcloud {

inline constexpr const char* kVersion = "1.0.0";

// Stream tags keep the random streams of different scenarios and roles apart.
enum class StreamTag : std::uint64_t { chernoff = 1, sweep = 2, compactness = 3, noise = 4 };

struct ChernoffRow {
  double ratio = 0.0;  ///< s / eps
  double kappa = 0.0;
  double expected = 0.0;
  std::uint64_t boxes = 0;
  std::uint64_t bad = 0;
  double empirical = 0.0;
  double bound = 0.0;        ///< exp(-2 kappa^2 E / (1 + kappa))
  double threshold = 0.0;    ///< bound + 4 binomial standard errors
  bool within = false;
  double rate_bound = 0.0;   ///< two-sided rate-function bound
  bool within_rate = false;
};

/// One (trial, eps, kappa) realization of the bad-box sweep.
struct SweepRow {
  int trial = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  double s = 0.0;
  double kappa = 0.0;
  std::uint64_t boxes = 0;
  double expected = 0.0;
  double mean_count = 0.0;
  std::uint64_t bad_count = 0;
  double bad_volume = 0.0;   ///< bad_count * s^d
  double eps_rho0 = 0.0;     ///< eps^rho0, rho0 = rho(kappa) / 2
  bool decay_ok = false;     ///< bad_volume <= eps_rho0
  bool zero_bad = false;
  std::uint64_t components = 0;
  std::uint64_t max_component = 0;
  double log_inv_s = 0.0;
  double component_ratio = 0.0;  ///< max_component / log(1/s)
  bool good_connected = false;
  std::uint64_t max_boundary = 0;
  std::uint64_t boundary_disconnected = 0;  ///< components whose boundary is not diagonally connected
  bool subcritical = false;
  std::string status = "ok";
  std::string reason;
};

/// One (trial, eps, kappa, q, alpha) row of the full pipeline.
struct CompactnessRow {
  int trial = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  double s = 0.0;
  double s_refined = 0.0;
  double kappa = 0.0;
  double q = 0.0;
  double alpha = 0.0;
  // cloud stage (always computed)
  std::uint64_t points_q = 0;
  double energy_p = 0.0;    ///< F_eps(u; Q)
  double norm_p = 0.0;      ///< eps^d sum_{x in Q} |u|^p
  std::uint64_t regular_count = 0;
  double regular_measure = 0.0;  ///< |V(eta^alpha) ∩ Q| on the raster
  double distance = 0.0;         ///< (int_{V ∩ Q} |u_hat - u|^q)^(1/q)
  // lattice stage
  std::string status = "ok";
  std::string reason;
  double expected_refined = 0.0;
  std::uint64_t boxes = 0;
  std::uint64_t bad_count = 0;
  std::uint64_t components = 0;
  std::uint64_t max_component = 0;
  double lattice_energy_p = std::nan("");   ///< face-pair p-energy of the coarse field on good boxes
  double energy_q = std::nan("");           ///< face-pair q-energy of Tu
  double good_pair_energy_q = std::nan("");
  double correction_q = std::nan("");
  double norm_q = std::nan("");
  double uno_bound = std::nan("");          ///< s'^p F_eps(u; Q)
  double lattice_distance = std::nan("");   ///< ||embed(Tu) - u||_{L^q(Q)}
  double successive_distance = std::nan(""); ///< ||embed(Tu_k) - embed(Tu_{k-1})||_{L^q(Q)}
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ChernoffRow> chernoff;
  std::vector<SweepRow> sweep;
  std::vector<CompactnessRow> compactness;
  std::string csv;
  std::size_t aborted = 0;
  std::map<std::string, std::size_t> abort_reasons;
};

inline double rho0_for(const ExperimentConfig& c, double kappa) { return rho_kappa(c.beta, c.d, c.gamma, kappa) / 2.0; }

template <int D>
Region<D> config_region(const ExperimentConfig& c) {
  Point<D> lo, hi;
  for (int i = 0; i < D; ++i) {
    lo[i] = c.region_lo[i];
    hi[i] = c.region_hi[i];
  }
  return Region<D>(lo, hi);
}

template <int D>
std::function<double(const Point<D>&)> target_function(const std::string& name) {
  if (name == "constant") return [](const Point<D>&) { return 1.0; };
  if (name == "linear") return [](const Point<D>& x) { return x[0]; };
  if (name == "sin")
    return [](const Point<D>& x) {
      double v = 1.0;
      for (int i = 0; i < D; ++i) v *= std::sin(M_PI * x[i]);
      return v;
    };
  throw std::invalid_argument("unknown target '" + name + "'");
}

// ---------------------------------------------------------------- chernoff

inline std::string chernoff_csv(const std::vector<ChernoffRow>& rows) {
  CsvWriter w({"ratio", "kappa", "expected", "boxes", "bad", "empirical", "bound", "threshold", "within",
               "rate_bound", "within_rate"});
  for (const auto& r : rows) {
    w.real(r.ratio).real(r.kappa).real(r.expected).integer(r.boxes).integer(r.bad).real(r.empirical);
    w.real(r.bound).real(r.threshold).flag(r.within).real(r.rate_bound).flag(r.within_rate);
    w.end_row();
  }
  return w.str();
}

/// Per grid point (s/eps, kappa): empirical bad-box frequency over
/// trials * boxes_per_side^d boxes against the tail bound. Clouds use eps = 1
/// and s = ratio; one cloud is shared by all kappa values.
template <int D>
std::vector<ChernoffRow> run_chernoff(const ExperimentConfig& c) {
  std::vector<ChernoffRow> rows;
  for (std::size_t ri = 0; ri < c.ratios.size(); ++ri) {
    const double s = c.ratios[ri];
    Point<D> lo, hi;
    for (int i = 0; i < D; ++i) {
      lo[i] = -s / 2;
      hi[i] = c.boxes_per_side * s - s / 2;
    }
    const Region<D> region(lo, hi);
    const auto partition = build_partition(region, s);
    std::vector<std::vector<std::uint64_t>> bad(c.trials, std::vector<std::uint64_t>(c.kappas.size(), 0));
    parallel_for(static_cast<std::size_t>(c.trials), c.threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t t = b; t < e; ++t) {
        const ProcessParams pp{c.gamma, 1.0, D, stream_seed(c.seed, {std::uint64_t(StreamTag::chernoff), ri, t})};
        const auto cloud = sample<D>(pp, region, SampleOptions{c.max_expected_points});
        for (std::size_t k = 0; k < c.kappas.size(); ++k)
          bad[t][k] = classify(cloud, partition, c.kappas[k], c.gamma).bad_count();
      }
    });
    const double expected = c.gamma * std::pow(s, D);
    const auto n = static_cast<std::uint64_t>(partition.size()) * static_cast<std::uint64_t>(c.trials);
    for (std::size_t k = 0; k < c.kappas.size(); ++k) {
      ChernoffRow r;
      r.ratio = s;
      r.kappa = c.kappas[k];
      r.expected = expected;
      r.boxes = n;
      for (const auto& v : bad) r.bad += v[k];
      r.empirical = static_cast<double>(r.bad) / static_cast<double>(n);
      r.bound = bad_box_bound(expected, r.kappa);
      r.threshold = r.bound + 4.0 * std::sqrt(r.bound * (1.0 - r.bound) / static_cast<double>(n));
      r.within = r.empirical <= r.threshold;
      r.rate_bound = poisson_rate_bound(expected, r.kappa);
      r.within_rate = r.empirical <= r.rate_bound + 4.0 * std::sqrt(r.rate_bound * (1.0 - std::min(1.0, r.rate_bound)) /
                                                                    static_cast<double>(n));
      rows.push_back(r);
    }
  }
  return rows;
}

// ------------------------------------------------------- decay / components

inline std::string decay_csv(const std::vector<SweepRow>& rows) {
  CsvWriter w({"trial", "seed", "epsilon", "s", "kappa", "boxes", "expected", "mean_count", "bad_count",
               "bad_volume", "eps_rho0", "decay_ok", "zero_bad", "status", "reason"});
  for (const auto& r : rows) {
    w.integer(r.trial).integer(static_cast<std::int64_t>(r.seed)).real(r.epsilon).real(r.s).real(r.kappa);
    w.integer(r.boxes).real(r.expected).real(r.mean_count).integer(r.bad_count).real(r.bad_volume);
    w.real(r.eps_rho0).flag(r.decay_ok).flag(r.zero_bad).text(r.status).text(r.reason);
    w.end_row();
  }
  return w.str();
}

inline std::string components_csv(const std::vector<SweepRow>& rows) {
  CsvWriter w({"trial", "seed", "epsilon", "s", "kappa", "boxes", "bad_count", "components", "max_component",
               "log_inv_s", "component_ratio", "good_connected", "max_boundary", "boundary_disconnected",
               "subcritical", "status", "reason"});
  for (const auto& r : rows) {
    w.integer(r.trial).integer(static_cast<std::int64_t>(r.seed)).real(r.epsilon).real(r.s).real(r.kappa);
    w.integer(r.boxes).integer(r.bad_count).integer(r.components).integer(r.max_component).real(r.log_inv_s);
    w.real(r.component_ratio).flag(r.good_connected).integer(r.max_boundary).integer(r.boundary_disconnected);
    w.flag(r.subcritical).text(r.status).text(r.reason);
    w.end_row();
  }
  return w.str();
}

/// Bad-box sweep on Q at s(eps): one cloud per (trial, eps), classified for
/// every kappa. Rows are ordered (trial, eps, kappa).
template <int D>
std::vector<SweepRow> run_sweep(const ExperimentConfig& c) {
  const auto q = config_region<D>(c);
  const auto sched = c.schedule();
  std::vector<std::vector<SweepRow>> per_trial(c.trials);
  parallel_for(static_cast<std::size_t>(c.trials), c.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t t = b; t < e; ++t) {
      for (std::size_t ei = 0; ei < c.epsilons.size(); ++ei) {
        const double eps = c.epsilons[ei];
        const double s = sched.s(eps);
        const std::uint64_t seed = stream_seed(c.seed, {std::uint64_t(StreamTag::sweep), t, ei});
        const auto partition = build_partition(q, s);
        // Edge boxes may stick out of Q; sample on their union so every box sees the full intensity.
        const auto cloud = sample<D>(ProcessParams{c.gamma, eps, D, seed}, partition.covered_region(),
                                     SampleOptions{c.max_expected_points});
        for (double kappa : c.kappas) {
          SweepRow r;
          r.trial = static_cast<int>(t);
          r.seed = seed;
          r.epsilon = eps;
          r.s = s;
          r.kappa = kappa;
          r.boxes = partition.size();
          r.expected = c.gamma * std::pow(s / eps, D);
          r.log_inv_s = std::log(1.0 / s);
          r.eps_rho0 = std::pow(eps, rho0_for(c, kappa));
          try {
            const auto cls = classify(cloud, partition, kappa, c.gamma);
            std::uint64_t total = 0;
            for (auto n : cls.counts) total += n;
            r.mean_count = static_cast<double>(total) / static_cast<double>(partition.size());
            const auto graph = components(cls, partition);
            const auto cert = certify(cls, graph, partition, rho0_for(c, kappa), eps);
            r.bad_count = cert.bad_count;
            r.bad_volume = cert.volume_bound;
            r.decay_ok = r.bad_volume <= r.eps_rho0;
            r.zero_bad = r.bad_count == 0;
            r.components = graph.count();
            r.max_component = cert.max_component;
            r.component_ratio = static_cast<double>(r.max_component) / r.log_inv_s;
            r.good_connected = cert.n0_ok;
            r.subcritical = cert.subcritical;
            for (std::size_t k = 0; k < graph.count(); ++k) {
              r.max_boundary = std::max<std::uint64_t>(r.max_boundary, graph.boundary[k].size());
              if (!boundary_connected(graph, k, partition)) ++r.boundary_disconnected;
            }
          } catch (const RegimeError& err) {
            r.status = "aborted";
            r.reason = err.code();
          }
          per_trial[t].push_back(std::move(r));
        }
      }
    }
  });
  std::vector<SweepRow> rows;
  for (auto& v : per_trial)
    for (auto& r : v) rows.push_back(std::move(r));
  return rows;
}

// -------------------------------------------------------------- compactness

inline std::string compactness_csv(const std::vector<CompactnessRow>& rows) {
  CsvWriter w({"trial", "seed", "epsilon", "s", "s_refined", "kappa", "q", "alpha", "points_q", "energy_p",
               "norm_p", "regular_count", "regular_measure", "distance", "status", "reason", "expected_refined",
               "boxes", "bad_count", "components", "max_component", "lattice_energy_p", "energy_q",
               "good_pair_energy_q", "correction_q", "norm_q", "uno_bound", "lattice_distance",
               "successive_distance"});
  for (const auto& r : rows) {
    w.integer(r.trial).integer(static_cast<std::int64_t>(r.seed)).real(r.epsilon).real(r.s).real(r.s_refined);
    w.real(r.kappa).real(r.q).real(r.alpha).integer(r.points_q).real(r.energy_p).real(r.norm_p);
    w.integer(r.regular_count).real(r.regular_measure).real(r.distance).text(r.status).text(r.reason);
    w.real(r.expected_refined).integer(r.boxes).integer(r.bad_count).integer(r.components).integer(r.max_component);
    w.real(r.lattice_energy_p).real(r.energy_q).real(r.good_pair_energy_q).real(r.correction_q).real(r.norm_q);
    w.real(r.uno_bound).real(r.lattice_distance).real(r.successive_distance);
    w.end_row();
  }
  return w.str();
}

namespace detail {

struct LatticeStage {
  std::string status = "ok";
  std::string reason;
  double expected = 0.0;
  std::uint64_t boxes = 0, bad_count = 0, components = 0, max_component = 0;
  double lattice_energy_p = std::nan("");
  std::vector<ExtensionEnergyReport> reports;  ///< one per q
  std::vector<double> lattice_distance;        ///< one per q
  std::vector<double> successive;              ///< one per q
};

}  // namespace detail

/// Full pipeline per (trial, eps): sample on A = Q dilated by the margin,
/// evaluate the cloud energy and the regular-set distance on Q, then coarsen
/// at s' on Q, classify, extend and embed. A lattice-stage precondition
/// failure marks the row aborted with a reason code; cloud-stage columns are
/// still reported.
template <int D>
std::vector<CompactnessRow> run_compactness(const ExperimentConfig& c) {
  const auto q_region = config_region<D>(c);
  const auto sched = c.schedule();
  const double margin = c.margin >= 0.0 ? c.margin : 2.0 * sched.s(c.epsilons.front());
  const Region<D> a_region = margin > 0.0 ? q_region.dilated(margin) : q_region;
  const auto target = target_function<D>(c.target);

  std::vector<std::vector<CompactnessRow>> per_trial(c.trials);
  parallel_for(static_cast<std::size_t>(c.trials), c.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t t = b; t < e; ++t) {
      // previous embedding per kappa, for the successive distance
      std::vector<std::optional<PiecewiseConstant<D>>> prev(c.kappas.size());
      for (std::size_t ei = 0; ei < c.epsilons.size(); ++ei) {
        const double eps = c.epsilons[ei];
        const double s = sched.s(eps);
        const double sr = sched.s_refined(eps);
        const std::uint64_t seed = stream_seed(c.seed, {std::uint64_t(StreamTag::compactness), t, ei});
        const auto cloud =
            sample<D>(ProcessParams{c.gamma, eps, D, seed}, a_region, SampleOptions{c.max_expected_points});

        std::vector<double> vals(cloud.size());
        Rng noise_rng(stream_seed(c.seed, {std::uint64_t(StreamTag::noise), t, ei}));
        for (std::size_t i = 0; i < cloud.size(); ++i) {
          vals[i] = target(cloud[i]);
          if (c.noise > 0.0) vals[i] += c.noise * s * noise_rng.uniform(-1.0, 1.0);
        }
        const CloudField<D> u(cloud, std::move(vals));
        const auto energy = cloud_energy(u, q_region, EnergyParams{c.p, s, eps, c.qs.front()});

        // regular set and distance on Q
        std::optional<VoronoiRaster<D>> raster;
        if (!cloud.empty()) raster = rasterize(cloud, a_region, eps / c.raster_divisor);
        std::vector<RegularityReport> regs;
        std::vector<double> measures;
        for (double alpha : c.alphas) {
          if (raster) {
            regs.push_back(regular_subcloud(*raster, cloud, alpha));
            measures.push_back(regular_region_mask(*raster, cloud, regs.back(), q_region).measure());
          } else {
            regs.emplace_back();
            measures.push_back(0.0);
          }
        }

        for (std::size_t ki = 0; ki < c.kappas.size(); ++ki) {
          const double kappa = c.kappas[ki];
          detail::LatticeStage ls;
          std::optional<PiecewiseConstant<D>> current;
          try {
            const auto partition = build_partition(q_region, sr);
            ls.boxes = partition.size();
            ls.expected = c.gamma * std::pow(sr / eps, D);
            const auto cls = classify(cloud, partition, kappa, c.gamma);
            const auto graph = components(cls, partition);
            ls.bad_count = cls.bad_count();
            ls.components = graph.count();
            ls.max_component = graph.max_size();
            LatticeField v;
            try {
              v = coarse_field(u, partition, cls.bad);
            } catch (const std::domain_error&) {
              throw RegimeError("empty_good_box", "good box without points");
            }
            const auto tv = extend(v, graph, partition);
            if (v.domain_size()) ls.lattice_energy_p = lattice_energy(v, partition, c.p, Adjacency::face);
            current = embed_lattice(tv, partition);
            for (double qq : c.qs) {
              ls.reports.push_back(extension_energy_report(v, tv, graph, partition, qq));
              ls.lattice_distance.push_back(lq_distance(*current, target, q_region, qq).value);
              ls.successive.push_back(prev[ki] ? lq_distance(*current, *prev[ki], q_region, qq) : std::nan(""));
            }
          } catch (const RegimeError& err) {
            ls = detail::LatticeStage{};
            ls.status = "aborted";
            ls.reason = err.code();
            ls.expected = c.gamma * std::pow(sr / eps, D);
            current.reset();
          }
          prev[ki] = std::move(current);

          for (std::size_t qi = 0; qi < c.qs.size(); ++qi) {
            const double qq = c.qs[qi];
            for (std::size_t ai = 0; ai < c.alphas.size(); ++ai) {
              CompactnessRow r;
              r.trial = static_cast<int>(t);
              r.seed = seed;
              r.epsilon = eps;
              r.s = s;
              r.s_refined = sr;
              r.kappa = kappa;
              r.q = qq;
              r.alpha = c.alphas[ai];
              r.points_q = energy.points.size();
              r.energy_p = energy.total;
              r.norm_p = energy.norm_p;
              if (raster) {
                r.regular_count = regs[ai].regular_count();
                r.regular_measure = measures[ai];
                r.distance = convergence_distance(u, target, *raster, regs[ai], q_region, qq);
              }
              r.status = ls.status;
              r.reason = ls.reason;
              r.expected_refined = ls.expected;
              r.boxes = ls.boxes;
              r.bad_count = ls.bad_count;
              r.components = ls.components;
              r.max_component = ls.max_component;
              r.uno_bound = std::pow(sr, c.p) * energy.total;
              if (ls.status == "ok") {
                r.lattice_energy_p = ls.lattice_energy_p;
                r.energy_q = ls.reports[qi].total_energy_q;
                r.good_pair_energy_q = ls.reports[qi].good_pair_energy_q;
                r.correction_q = ls.reports[qi].correction_q;
                r.norm_q = ls.reports[qi].norm_q;
                r.lattice_distance = ls.lattice_distance[qi];
                r.successive_distance = ls.successive[qi];
              }
              per_trial[t].push_back(std::move(r));
            }
          }
        }
      }
    }
  });
  std::vector<CompactnessRow> rows;
  for (auto& v : per_trial)
    for (auto& r : v) rows.push_back(std::move(r));
  return rows;
}

// ------------------------------------------------------------------ driver

template <int D>
ExperimentResult run_experiment_d(const ExperimentConfig& c) {
  ExperimentResult res;
  res.config = c;
  if (c.scenario == "chernoff") {
    res.chernoff = run_chernoff<D>(c);
    res.csv = chernoff_csv(res.chernoff);
  } else if (c.scenario == "decay" || c.scenario == "components") {
    res.sweep = run_sweep<D>(c);
    res.csv = c.scenario == "decay" ? decay_csv(res.sweep) : components_csv(res.sweep);
    for (const auto& r : res.sweep)
      if (r.status != "ok") ++res.aborted, ++res.abort_reasons[r.reason];
  } else {
    res.compactness = run_compactness<D>(c);
    res.csv = compactness_csv(res.compactness);
    for (const auto& r : res.compactness)
      if (r.status != "ok") ++res.aborted, ++res.abort_reasons[r.reason];
  }
  return res;
}

inline ExperimentResult run_experiment(const ExperimentConfig& c) {
  c.validate();
  switch (c.d) {
    case 1: return run_experiment_d<1>(c);
    case 2: return run_experiment_d<2>(c);
    case 3: return run_experiment_d<3>(c);
  }
  throw std::invalid_argument("run_experiment: d must be 1..3");
}

/// Manifest entry for one scenario run.
inline nlohmann::json manifest_entry(const ExperimentResult& res, double runtime_seconds) {
  const auto& c = res.config;
  nlohmann::json rho;
  for (double k : c.kappas) rho.push_back({{"kappa", k}, {"rho0", rho0_for(c, k)}});
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(c)));
  return nlohmann::json{{"config_hash", hash},
                        {"config", config_to_json(c)},
                        {"csv", c.scenario + ".csv"},
                        {"rows", std::count(res.csv.begin(), res.csv.end(), '\n') - 1},
                        {"aborted", res.aborted},
                        {"abort_reasons", res.abort_reasons},
                        {"rho0", rho0_for(c, c.kappas.front())},
                        {"rho0_by_kappa", rho},
                        {"runtime_seconds", runtime_seconds}};
}

/// Run a scenario and write <outdir>/<scenario>.csv plus <outdir>/manifest.json
/// (merged with entries of other scenarios already present).
inline ExperimentResult run_and_write(const ExperimentConfig& c) {
  namespace fs = std::filesystem;
  const auto t0 = std::chrono::steady_clock::now();
  auto res = run_experiment(c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  fs::create_directories(c.outdir);
  {
    std::ofstream out(fs::path(c.outdir) / (c.scenario + ".csv"), std::ios::binary);
    out << res.csv;
    if (!out) throw std::runtime_error("cannot write CSV in " + c.outdir);
  }
  const auto mpath = fs::path(c.outdir) / "manifest.json";
  nlohmann::json m = nlohmann::json::object();
  if (fs::exists(mpath)) {
    std::ifstream in(mpath);
    m = nlohmann::json::parse(in, nullptr, false);
    if (m.is_discarded() || !m.is_object()) m = nlohmann::json::object();
  }
  m["version"] = kVersion;
  m["scenarios"][c.scenario] = manifest_entry(res, secs);
  if (c.scenario == "decay" || !m.contains("rho0")) m["rho0"] = rho0_for(c, c.kappas.front());
  std::ofstream out(mpath, std::ios::binary);
  out << m.dump(2) << '\n';
  return res;
}

}  // namespace ppcloud
