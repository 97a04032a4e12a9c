// SPDX-License-Identifier: Apache-2.0
// Command-line front end: sampling, energies, bad-box analysis, extension,
// regularity and config-driven experiments.
#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ppcloud/bad_boxes.hpp"
#include "ppcloud/energy.hpp"
#include "ppcloud/experiments/runners.hpp"
#include "ppcloud/extension.hpp"
#include "ppcloud/io.hpp"
#include "ppcloud/regularity.hpp"

using namespace ppcloud;

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

template <int D>
Region<D> parse_region(const std::string& text) {
  const auto v = parse_list(text);
  if (static_cast<int>(v.size()) != 2 * D)
    throw std::invalid_argument("--region needs " + std::to_string(2 * D) + " numbers: lo..., hi...");
  Point<D> lo, hi;
  for (int i = 0; i < D; ++i) {
    lo[i] = v[i];
    hi[i] = v[D + i];
  }
  return Region<D>(lo, hi);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

int file_dimension(const std::string& path) {
  auto in = open_in(path);
  return io::cloud_dimension(in);
}

/// Smallest half-open box containing `hint` (if given) and all points.
template <int D>
Region<D> support_of(const std::vector<Point<D>>& pts, const std::string& hint) {
  Point<D> lo, hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  if (!hint.empty()) {
    const auto r = parse_region<D>(hint);
    lo = r.lo;
    hi = r.hi;
  }
  for (const auto& x : pts)
    for (int i = 0; i < D; ++i) {
      lo[i] = std::min(lo[i], x[i]);
      hi[i] = std::max(hi[i], std::nextafter(x[i], std::numeric_limits<double>::infinity()));
    }
  return Region<D>(lo, hi);
}

template <int D>
PointCloud<D> load_cloud(const std::string& path, double gamma, double epsilon, const std::string& region) {
  auto in = open_in(path);
  auto pts = io::read_points<D>(in);
  const auto support = support_of<D>(pts, region);
  return PointCloud<D>(std::move(pts), ProcessParams{gamma, epsilon, D, 0}, support);
}

template <template <int> class Cmd, class... Args>
int dispatch(int d, Args&&... args) {
  switch (d) {
    case 1: return Cmd<1>::run(std::forward<Args>(args)...);
    case 2: return Cmd<2>::run(std::forward<Args>(args)...);
    case 3: return Cmd<3>::run(std::forward<Args>(args)...);
  }
  throw std::invalid_argument("dimension must be 1, 2 or 3");
}

struct SampleOpts {
  double gamma = 1.0, epsilon = 0.1;
  int dim = 2;
  std::uint64_t seed = 0;
  std::string region, out;
};

template <int D>
struct SampleCmd {
  static int run(const SampleOpts& o) {
    const Region<D> r = o.region.empty() ? unit_cube<D>() : parse_region<D>(o.region);
    const auto cloud = sample<D>(ProcessParams{o.gamma, o.epsilon, D, o.seed}, r);
    if (o.out.empty()) {
      io::write_cloud(std::cout, cloud);
    } else {
      auto out = open_out(o.out);
      io::write_cloud(out, cloud);
    }
    std::cerr << cloud.size() << " points\n";
    return 0;
  }
};

struct EnergyOpts {
  std::string cloud, field, region, support, out;
  double p = 2.0, s = 0.1, epsilon = 0.1, gamma = 1.0;
  unsigned threads = 1;
};

template <int D>
struct EnergyCmd {
  static int run(const EnergyOpts& o) {
    const auto cloud = load_cloud<D>(o.cloud, o.gamma, o.epsilon, o.support.empty() ? o.region : o.support);
    auto fin = open_in(o.field);
    const CloudField<D> u(cloud, io::read_cloud_values(fin));
    const Region<D> a = o.region.empty() ? cloud.region() : parse_region<D>(o.region);
    const auto e = cloud_energy(u, a, EnergyParams{o.p, o.s, o.epsilon, 1.0}, o.threads);
    std::cout << "total=" << format_exact(e.total) << " norm_p=" << format_exact(e.norm_p) << '\n';
    if (!o.out.empty()) {
      auto out = open_out(o.out);
      out << "point_index,grad_p\n";
      for (std::size_t k = 0; k < e.points.size(); ++k) out << e.points[k] << ',' << format_exact(e.per_point[k]) << '\n';
    }
    return 0;
  }
};

struct BoxOpts {
  std::string cloud, region, out, members, dump_partition;
  double s = 0.1, kappa = 0.5, gamma = 1.0, epsilon = 0.1;
  bool components = false;
};

template <int D>
struct BoxCmd {
  static int run(const BoxOpts& o) {
    const auto cloud = load_cloud<D>(o.cloud, o.gamma, o.epsilon, o.region);
    const Region<D> q = o.region.empty() ? cloud.region() : parse_region<D>(o.region);
    const auto partition = build_partition(q, o.s);
    if (!o.dump_partition.empty()) {
      auto out = open_out(o.dump_partition);
      io::write_partition(out, partition);
    }
    const auto cls = classify(cloud, partition, o.kappa, o.gamma);
    std::ofstream file;
    if (!o.out.empty()) file = open_out(o.out);
    std::ostream& out = o.out.empty() ? std::cout : file;
    if (!o.components) {
      io::write_classification(out, cls, partition);
      std::cerr << cls.bad_count() << " of " << partition.size() << " boxes bad\n";
      return 0;
    }
    const auto g = components(cls, partition);
    io::write_components(out, g, partition);
    if (!o.members.empty()) {
      auto m = open_out(o.members);
      io::write_component_members(m, g, partition);
    }
    std::cerr << g.count() << " components, good set "
              << (good_is_connected(cls, partition) ? "connected" : "disconnected") << '\n';
    return 0;
  }
};

struct ExtendOpts {
  std::string field, components, out;
  double s = 0.1;
  int dim = 2;
};

template <int D>
struct ExtendCmd {
  static int run(const ExtendOpts& o) {
    auto fin = open_in(o.field);
    const auto values = io::read_lattice_values<D>(fin);
    std::vector<BoxId<D>> bad_ids;
    if (!o.components.empty()) {
      auto cin = open_in(o.components);
      bad_ids = io::read_component_members<D>(cin);
    }
    std::vector<BoxId<D>> all = bad_ids;
    for (const auto& [id, v] : values) all.push_back(id);
    const auto partition = io::partition_from_boxes(all, o.s);
    std::vector<char> bad(partition.size(), 0);
    for (const auto& id : bad_ids) bad[*partition.index_of(id)] = 1;
    LatticeField v(partition.size());
    for (const auto& [id, val] : values) v.set(*partition.index_of(id), val);
    const auto graph = components(classification_from_mask(bad), partition);
    const auto tv = extend(v, graph, partition);
    std::ofstream file;
    if (!o.out.empty()) file = open_out(o.out);
    io::write_lattice_field(o.out.empty() ? std::cout : file, tv, partition);
    return 0;
  }
};

struct RegularityOpts {
  std::string cloud, region, out, raster;
  double alpha = 0.1, h = 0.0, epsilon = 0.1, gamma = 1.0;
  unsigned threads = 1;
};

template <int D>
struct RegularityCmd {
  static int run(const RegularityOpts& o) {
    const auto cloud = load_cloud<D>(o.cloud, o.gamma, o.epsilon, o.region);
    const double h = o.h > 0.0 ? o.h : o.epsilon / 8.0;
    const auto vr = rasterize(cloud, cloud.region(), h, o.threads);
    const auto rep = regular_subcloud(vr, cloud, o.alpha);
    std::ofstream file;
    if (!o.out.empty()) file = open_out(o.out);
    io::write_regularity(o.out.empty() ? std::cout : file, rep);
    if (!o.raster.empty()) {
      auto r = open_out(o.raster);
      io::write_raster_labels(r, vr);
      std::cerr << "raster " << vr.grid.dim(0);
      for (int i = 1; i < D; ++i) std::cerr << 'x' << vr.grid.dim(i);
      std::cerr << " cells\n";
    }
    std::cerr << rep.regular_count() << " of " << cloud.size() << " points regular\n";
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson point-cloud simulation toolkit"};
  app.require_subcommand(1);

  SampleOpts so;
  auto* sc = app.add_subcommand("sample", "draw a Poisson point cloud");
  sc->add_option("--gamma", so.gamma, "base intensity")->default_val(1.0);
  sc->add_option("--epsilon", so.epsilon, "scale")->required();
  sc->add_option("--dim", so.dim, "dimension (1-3)")->default_val(2);
  sc->add_option("--seed", so.seed, "seed")->default_val(0);
  sc->add_option("--region", so.region, "lo1,..,lod,hi1,..,hid (default unit cube centred at 0)");
  sc->add_option("--out", so.out, "output CSV (default stdout)");

  EnergyOpts eo;
  auto* ec = app.add_subcommand("energy", "nonlocal p-Dirichlet energy of a cloud field");
  ec->add_option("--cloud", eo.cloud)->required();
  ec->add_option("--field", eo.field, "CSV with header 'value', one row per point")->required();
  ec->add_option("--p", eo.p)->default_val(2.0);
  ec->add_option("--s", eo.s)->required();
  ec->add_option("--epsilon", eo.epsilon)->required();
  ec->add_option("--region", eo.region, "energy region A (default: cloud support)");
  ec->add_option("--support", eo.support, "cloud support region (default: region plus all points)");
  ec->add_option("--out", eo.out, "per-point CSV");
  ec->add_option("--threads", eo.threads)->default_val(1);

  BoxOpts bo;
  auto* cc = app.add_subcommand("classify", "good/bad box classification");
  auto* kc = app.add_subcommand("components", "bad-set components and boundaries");
  for (auto* cmd : {cc, kc}) {
    cmd->add_option("--cloud", bo.cloud)->required();
    cmd->add_option("--s", bo.s)->required();
    cmd->add_option("--kappa", bo.kappa)->default_val(0.5);
    cmd->add_option("--gamma", bo.gamma)->default_val(1.0);
    cmd->add_option("--epsilon", bo.epsilon)->required();
    cmd->add_option("--region", bo.region, "region Q (default: bounding box of the cloud)");
    cmd->add_option("--out", bo.out);
    cmd->add_option("--dump-partition", bo.dump_partition, "write the partition as J1..Jd CSV");
  }
  kc->add_option("--members", bo.members, "write component_id,J1..Jd per bad box");

  ExtendOpts xo;
  auto* xc = app.add_subcommand("extend", "fill bad components with boundary averages");
  xc->add_option("--field", xo.field, "lattice CSV J1..Jd,value on the good boxes")->required();
  xc->add_option("--components", xo.components, "component member CSV from 'components --members'");
  xc->add_option("--s", xo.s)->required();
  xc->add_option("--dim", xo.dim)->default_val(2);
  xc->add_option("--out", xo.out);

  RegularityOpts ro;
  auto* rc = app.add_subcommand("regularity", "Voronoi regular subcloud");
  rc->add_option("--cloud", ro.cloud)->required();
  rc->add_option("--alpha", ro.alpha)->default_val(0.1);
  rc->add_option("--pitch", ro.h, "raster pitch h (default epsilon/8)");
  rc->add_option("--epsilon", ro.epsilon)->required();
  rc->add_option("--region", ro.region, "raster region (default: bounding box of the cloud)");
  rc->add_option("--out", ro.out);
  rc->add_option("--raster", ro.raster, "raw little-endian uint32 label dump");
  rc->add_option("--threads", ro.threads)->default_val(1);

  std::string config_path, outdir;
  unsigned threads = 0;
  auto* xp = app.add_subcommand("experiment", "config-driven experiments");
  auto* run = xp->add_subcommand("run", "run one scenario config");
  xp->require_subcommand(1);
  run->add_option("config", config_path, "JSON config")->required();
  run->add_option("--threads", threads, "override the config's thread count");
  run->add_option("--outdir", outdir, "override the config's output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sc->parsed()) return dispatch<SampleCmd>(so.dim, so);
    if (ec->parsed()) return dispatch<EnergyCmd>(file_dimension(eo.cloud), eo);
    if (cc->parsed() || kc->parsed()) {
      bo.components = kc->parsed();
      return dispatch<BoxCmd>(file_dimension(bo.cloud), bo);
    }
    if (xc->parsed()) return dispatch<ExtendCmd>(xo.dim, xo);
    if (rc->parsed()) return dispatch<RegularityCmd>(file_dimension(ro.cloud), ro);
    if (run->parsed()) {
      auto cfg = load_config(config_path);
      if (threads) cfg.threads = threads;
      if (!outdir.empty()) cfg.outdir = outdir;
      const auto res = run_and_write(cfg);
      std::cerr << cfg.scenario << ": " << std::count(res.csv.begin(), res.csv.end(), '\n') - 1 << " rows, "
                << res.aborted << " aborted -> " << cfg.outdir << '\n';
      return 0;
    }
  } catch (const RegimeError& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
