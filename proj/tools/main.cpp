// Command line front end: Monte Carlo runs, fee sweeps, data calibration,
// historical backtests and quick looks at observed CEX/AMM data.  Every
// subcommand writes a manifest.json into the output directory before doing
// any work, then its result files, all via atomic renames.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "amm/backtest.hpp"
#include "amm/calibrate.hpp"
#include "amm/closed_form.hpp"
#include "amm/csv.hpp"
#include "amm/ensemble.hpp"
#include "amm/errors.hpp"
#include "amm/historical.hpp"
#include "amm/market_data.hpp"
#include "amm/sim.hpp"
#include "amm/stats.hpp"
#include "amm/sweep.hpp"
#include "amm/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Axis syntax: either "a,b,c" (explicit values) or "lo:hi:n" (n evenly
// spaced points, endpoints included).
std::vector<double> parse_axis(const std::string& text, double scale = 1.0) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double lo = 0, hi = 0;
    long n = 0;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%ld%c", &lo, &hi, &n, &extra) != 3 ||
        n < 1)
      throw std::invalid_argument("bad axis range '" + text +
                                  "' (want lo:hi:n)");
    if (n == 1) {
      out.push_back(lo);
    } else {
      for (long i = 0; i < n; ++i)
        out.push_back(lo + (hi - lo) * double(i) / double(n - 1));
    }
  } else {
    for (const auto& f : amm::csv::split_line(text)) {
      if (!amm::csv::is_number(f))
        throw std::invalid_argument("bad axis value '" + f + "' in '" + text + "'");
      out.push_back(std::stod(f));
    }
  }
  for (auto& v : out) v *= scale;
  return out;
}

struct CommonOpts {
  std::string out_dir = ".";
  uint64_t seed = amm::kDefaultSeed;
  int workers = 0;

  int resolved_workers() const {
    return workers > 0 ? workers
                       : int(std::max(1u, std::thread::hardware_concurrency()));
  }
};

struct FeeOpts {
  double cex_bps = 20.0;
  double amm_bps = 15.0;
  double arb_bps = -1.0;  // negative: follow the CEX fee
  double hedge_bps = 0.0;

  amm::FeeSchedule schedule() const {
    auto f = amm::FeeSchedule::make(cex_bps * 1e-4, amm_bps * 1e-4);
    if (arb_bps >= 0.0) f.arb_fee = arb_bps * 1e-4;
    f.hedge_fee = hedge_bps * 1e-4;
    return f;
  }
};

void add_fee_flags(CLI::App* cmd, FeeOpts& f) {
  cmd->add_option("--cex-fee-bps", f.cex_bps, "CEX taker fee, basis points")
      ->capture_default_str();
  cmd->add_option("--amm-fee-bps", f.amm_bps, "pool fee, basis points")
      ->capture_default_str();
  cmd->add_option("--arb-fee-bps", f.arb_bps,
                  "arbitrageur's CEX fee (default: --cex-fee-bps)");
  cmd->add_option("--hedge-fee-bps", f.hedge_bps,
                  "LP hedge rebalancing fee, basis points")
      ->capture_default_str();
}

json fees_json(const amm::FeeSchedule& f) {
  return {{"cex_fee", f.cex_fee},
          {"amm_fee", f.amm_fee},
          {"arb_fee", f.arb_fee},
          {"hedge_fee", f.hedge_fee}};
}

json bounds_json(const amm::RegionBounds& b) {
  return {{"buy_bound", b.buy_bound},   {"sell_bound", b.sell_bound},
          {"arb_low", b.arb_low},       {"arb_high", b.arb_high},
          {"profit_low", b.profit_low}, {"profit_high", b.profit_high}};
}

json summary_json(const amm::SummaryStats& s) {
  json j{{"n_paths", s.n_paths},
         {"mean_hedged_pnl", s.mean_hedged_pnl},
         {"sd_hedged_pnl", s.sd_hedged_pnl},
         {"se_hedged_pnl", s.se_hedged_pnl},
         {"mean_unhedged_pnl", s.mean_unhedged_pnl},
         {"sd_unhedged_pnl", s.sd_unhedged_pnl},
         {"mean_tracking_error", s.mean_tracking_error},
         {"mean_fees", s.mean_fees},
         {"mean_volume", s.mean_volume},
         {"mean_volume_fundamental", s.mean_volume_fundamental},
         {"p_profit", s.p_profit},
         {"p_buysell", s.p_buysell},
         {"p_arb", s.p_arb}};
  for (size_t c = 0; c < amm::kTraderClassCount; ++c) {
    j["mean_volume_by_class"].push_back(s.mean_volume_by_class[c]);
    j["mean_fees_by_class"].push_back(s.mean_fees_by_class[c]);
  }
  return j;
}

amm::SummaryStats summary_from_json(const json& j) {
  amm::SummaryStats s;
  s.n_paths = j.at("n_paths").get<int>();
  s.mean_hedged_pnl = j.at("mean_hedged_pnl").get<double>();
  s.sd_hedged_pnl = j.at("sd_hedged_pnl").get<double>();
  s.se_hedged_pnl = j.at("se_hedged_pnl").get<double>();
  s.mean_unhedged_pnl = j.at("mean_unhedged_pnl").get<double>();
  s.sd_unhedged_pnl = j.at("sd_unhedged_pnl").get<double>();
  s.mean_tracking_error = j.at("mean_tracking_error").get<double>();
  s.mean_fees = j.at("mean_fees").get<double>();
  s.mean_volume = j.at("mean_volume").get<double>();
  s.mean_volume_fundamental = j.at("mean_volume_fundamental").get<double>();
  s.p_profit = j.at("p_profit").get<double>();
  s.p_buysell = j.at("p_buysell").get<double>();
  s.p_arb = j.at("p_arb").get<double>();
  for (size_t c = 0; c < amm::kTraderClassCount; ++c) {
    s.mean_volume_by_class[c] = j.at("mean_volume_by_class").at(c).get<double>();
    s.mean_fees_by_class[c] = j.at("mean_fees_by_class").at(c).get<double>();
  }
  return s;
}

const char* kSummaryCsvHeader =
    "n_paths,mean_hedged_pnl,se_hedged_pnl,sd_hedged_pnl,mean_unhedged_pnl,"
    "sd_unhedged_pnl,mean_tracking_error,mean_fees,mean_volume,"
    "mean_volume_fundamental,p_profit,p_buysell,p_arb";

void append_summary_row(std::ostream& os, const amm::SummaryStats& s) {
  os << s.n_paths << ',' << fmt(s.mean_hedged_pnl) << ','
     << fmt(s.se_hedged_pnl) << ',' << fmt(s.sd_hedged_pnl) << ','
     << fmt(s.mean_unhedged_pnl) << ',' << fmt(s.sd_unhedged_pnl) << ','
     << fmt(s.mean_tracking_error) << ',' << fmt(s.mean_fees) << ','
     << fmt(s.mean_volume) << ',' << fmt(s.mean_volume_fundamental) << ','
     << fmt(s.p_profit) << ',' << fmt(s.p_buysell) << ',' << fmt(s.p_arb);
}

void write_histogram_csv(const fs::path& path, const amm::Histogram& h,
                         bool with_mass = false) {
  amm::csv::atomic_write(path, [&](std::ostream& os) {
    os << (with_mass ? "bin_left,bin_right,count,mass\n"
                     : "bin_left,bin_right,count\n");
    auto mass = h.total() > 0 && with_mass ? h.mass() : std::vector<double>{};
    for (int i = 0; i < h.spec().bins; ++i) {
      os << fmt(h.bin_left(i)) << ',' << fmt(h.bin_right(i)) << ','
         << h.counts()[size_t(i)];
      if (with_mass) os << ',' << fmt(mass.empty() ? 0.0 : mass[size_t(i)]);
      os << '\n';
    }
  });
}

fs::path prepare_out_dir(const CommonOpts& c) {
  fs::path dir = c.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw amm::DataError("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& subcommand,
                    const CommonOpts& common, json config) {
  json m{{"tool", "ammsim"},
         {"version", amm::kVersion},
         {"subcommand", subcommand},
         {"seed", common.seed},
         {"workers", common.resolved_workers()},
         {"out_dir", dir.string()},
         {"config", std::move(config)}};
  amm::csv::atomic_write(dir / "manifest.json",
                         [&](std::ostream& os) { os << m.dump(2) << '\n'; });
}

void write_json(const fs::path& path, const json& j) {
  amm::csv::atomic_write(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
  CommonOpts common;
  FeeOpts fees;
  int paths = 10000;
  int steps = 1440;
  double horizon = 1.0;
  double x0 = 3.0e7, y0 = 1.0e4, price0 = 3000.0;
  double sigma = 0.04, mu = 0.0;
  double ou_kappa = -1.0;  // negative: plain GBM
  double ou_mean = 0.0;    // long-run price level; 0 means price0
  double demand = 10000.0; // total fundamental flow per day, both sides
  double noise = 0.0;
  std::string cex_file;
  int ratio_bins = 201, pnl_bins = 101;
  bool post_trade = false;
};

int run_simulate(const SimulateOpts& o) {
  amm::SimConfig cfg;
  cfg.fees = o.fees.schedule();
  cfg.reserve_x0 = o.x0;
  cfg.reserve_y0 = o.y0;
  cfg.cex_price0 = o.price0;
  cfg.n_steps = o.steps;
  cfg.horizon = o.horizon;
  cfg.buy_demand = 0.5 * o.demand;
  cfg.sell_demand = 0.5 * o.demand;
  cfg.noise_volume = o.noise;
  cfg.seed = o.common.seed;

  json model;
  if (!o.cex_file.empty()) {
    auto path = amm::load_price_csv(o.cex_file);
    cfg.n_steps = path.steps();
    cfg.horizon = path.steps() * path.dt;
    cfg.cex_price0 = path.values.front();
    model = {{"type", "historical"}, {"file", o.cex_file},
             {"steps", cfg.n_steps}, {"dt_days", path.dt}};
    cfg.model = amm::HistoricalSeries{
        std::make_shared<amm::PricePath>(std::move(path))};
  } else if (o.ou_kappa >= 0.0) {
    double mean = o.ou_mean > 0.0 ? o.ou_mean : cfg.cex_price0;
    cfg.model = amm::ExpOuParams{o.ou_kappa, std::log(mean), o.sigma};
    model = {{"type", "exp_ou"}, {"kappa", o.ou_kappa},
             {"mean_price", mean}, {"sigma", o.sigma}};
  } else {
    cfg.model = amm::GbmParams{o.sigma, o.mu};
    model = {{"type", "gbm"}, {"sigma", o.sigma}, {"mu", o.mu}};
  }
  validate(cfg);

  fs::path dir = prepare_out_dir(o.common);
  write_manifest(dir, "simulate", o.common,
                 {{"paths", o.paths},
                  {"steps", cfg.n_steps},
                  {"horizon_days", cfg.horizon},
                  {"reserve_x0", cfg.reserve_x0},
                  {"reserve_y0", cfg.reserve_y0},
                  {"price0", cfg.cex_price0},
                  {"demand_per_day", o.demand},
                  {"noise_per_day", o.noise},
                  {"fees", fees_json(cfg.fees)},
                  {"model", model},
                  {"ratio_bins", o.ratio_bins},
                  {"pnl_bins", o.pnl_bins},
                  {"post_trade_ratios", o.post_trade}});

  amm::EnsembleOptions opts;
  opts.workers = o.common.workers;
  opts.ratio_histogram = true;
  opts.post_trade_ratios = o.post_trade;
  opts.ratio_spec =
      amm::default_ratio_spec(amm::region_bounds(cfg.fees), o.ratio_bins);
  auto ens = amm::run_ensemble(cfg, o.paths, opts);
  auto s = amm::summarize(ens);

  json out = summary_json(s);
  out["bounds"] = bounds_json(amm::region_bounds(cfg.fees));
  write_json(dir / "summary.json", out);
  amm::csv::atomic_write(dir / "summary.csv", [&](std::ostream& os) {
    os << kSummaryCsvHeader << '\n';
    append_summary_row(os, s);
    os << '\n';
  });
  write_histogram_csv(dir / "ratio_histogram.csv", ens.ratio_hist);
  write_histogram_csv(
      dir / "pnl_histogram.csv",
      amm::pnl_histogram(std::span<const amm::PathStats>(ens.paths), o.pnl_bins));
  std::printf("simulate: %d paths, mean hedged pnl %s (se %s)\n", s.n_paths,
              fmt(s.mean_hedged_pnl).c_str(), fmt(s.se_hedged_pnl).c_str());
  return 0;
}

// ------------------------------------------------------------------- sweep

struct SweepOptsCli {
  CommonOpts common;
  FeeOpts fees;
  std::string amm_axis = "5:25:5";
  std::string sigma_axis = "0.025:0.055:3";
  std::string demand_axis = "10000";
  std::string cex_axis = "20";
  int paths_per_cell = 5000;
  int steps = 1440;
  double horizon = 1.0;
  double x0 = 3.0e7, y0 = 1.0e4, price0 = 3000.0;
  double noise = 0.0;
  double regret_at_bps = -1.0;
  bool resume = false;
};

json cell_json(const amm::SweepCell& c) {
  return {{"i_sigma", c.i_sigma},   {"i_demand", c.i_demand},
          {"i_cex_fee", c.i_cex_fee}, {"i_amm_fee", c.i_amm_fee},
          {"sigma", c.sigma},       {"demand", c.demand},
          {"cex_fee", c.cex_fee},   {"amm_fee", c.amm_fee},
          {"stats", summary_json(c.stats)}};
}

amm::SweepCell cell_from_json(const json& j) {
  amm::SweepCell c;
  c.i_sigma = j.at("i_sigma").get<int>();
  c.i_demand = j.at("i_demand").get<int>();
  c.i_cex_fee = j.at("i_cex_fee").get<int>();
  c.i_amm_fee = j.at("i_amm_fee").get<int>();
  c.sigma = j.at("sigma").get<double>();
  c.demand = j.at("demand").get<double>();
  c.cex_fee = j.at("cex_fee").get<double>();
  c.amm_fee = j.at("amm_fee").get<double>();
  c.stats = summary_from_json(j.at("stats"));
  return c;
}

// Completed cells from an earlier interrupted run.  A torn final line (the
// process died mid-write) is dropped; anything else malformed is an error.
std::vector<amm::SweepCell> load_cells(const fs::path& file,
                                       const amm::SweepAxes& axes) {
  std::vector<amm::SweepCell> out;
  std::ifstream in(file);
  if (!in) return out;
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  for (size_t i = 0; i < lines.size(); ++i) {
    json j = json::parse(lines[i], nullptr, false);
    if (j.is_discarded()) {
      if (i + 1 == lines.size()) {
        std::fprintf(stderr, "note: dropping torn final line of %s\n",
                     file.string().c_str());
        break;
      }
      throw amm::DataError(file.string() + ": line " + std::to_string(i + 1) +
                           " is not valid JSON");
    }
    amm::SweepCell c;
    try {
      c = cell_from_json(j);
    } catch (const json::exception& e) {
      throw amm::DataError(file.string() + ": line " + std::to_string(i + 1) +
                           ": " + e.what());
    }
    auto on_axis = [](const std::vector<double>& a, int idx, double v) {
      return idx >= 0 && size_t(idx) < a.size() &&
             std::fabs(a[size_t(idx)] - v) <= 1e-12;
    };
    if (!on_axis(axes.sigma, c.i_sigma, c.sigma) ||
        !on_axis(axes.demand, c.i_demand, c.demand) ||
        !on_axis(axes.cex_fee, c.i_cex_fee, c.cex_fee) ||
        !on_axis(axes.amm_fee, c.i_amm_fee, c.amm_fee))
      throw amm::DataError(file.string() +
                           ": saved cells do not match the requested grid");
    out.push_back(c);
  }
  return out;
}

int run_sweep(const SweepOptsCli& o) {
  amm::SweepAxes axes;
  axes.amm_fee = parse_axis(o.amm_axis, 1e-4);
  axes.sigma = parse_axis(o.sigma_axis);
  axes.demand = parse_axis(o.demand_axis);
  axes.cex_fee = parse_axis(o.cex_axis, 1e-4);

  amm::SimConfig base;
  base.fees = o.fees.schedule();
  base.reserve_x0 = o.x0;
  base.reserve_y0 = o.y0;
  base.cex_price0 = o.price0;
  base.n_steps = o.steps;
  base.horizon = o.horizon;
  base.noise_volume = o.noise;
  base.seed = o.common.seed;
  base.model = amm::GbmParams{axes.sigma.front(), 0.0};

  fs::path dir = prepare_out_dir(o.common);
  write_manifest(dir, "sweep", o.common,
                 {{"amm_fee_axis", axes.amm_fee},
                  {"sigma_axis", axes.sigma},
                  {"demand_axis", axes.demand},
                  {"cex_fee_axis", axes.cex_fee},
                  {"paths_per_cell", o.paths_per_cell},
                  {"steps", o.steps},
                  {"horizon_days", o.horizon},
                  {"reserve_x0", o.x0},
                  {"reserve_y0", o.y0},
                  {"price0", o.price0},
                  {"noise_per_day", o.noise},
                  {"fees", fees_json(base.fees)},
                  {"resume", o.resume},
                  {"regret_at_bps", o.regret_at_bps}});

  fs::path cells_file = dir / "cells.jsonl";
  amm::SweepOptions opts;
  opts.paths_per_cell = o.paths_per_cell;
  opts.workers = o.common.workers;
  if (o.resume) opts.precomputed = load_cells(cells_file, axes);

  // Rewriting the saved cells (instead of appending) keeps the file valid
  // even when the previous run died mid-line.
  std::ofstream cells_out(cells_file, std::ios::trunc);
  if (!cells_out)
    throw amm::DataError("cannot open for writing: " + cells_file.string());
  for (const auto& c : opts.precomputed) cells_out << cell_json(c).dump() << '\n';
  cells_out.flush();
  size_t done = opts.precomputed.size();
  const size_t total = axes.amm_fee.size() * axes.sigma.size() *
                       axes.demand.size() * axes.cex_fee.size();
  opts.on_cell = [&](const amm::SweepCell& c) {
    cells_out << cell_json(c).dump() << '\n';
    cells_out.flush();
    ++done;
    std::fprintf(stderr, "\rsweep: %zu/%zu cells", done, total);
  };

  auto surf = amm::sweep(base, axes, opts);
  std::fprintf(stderr, "\n");

  amm::csv::atomic_write(dir / "surface.csv", [&](std::ostream& os) {
    os << "i_sigma,i_demand,i_cex_fee,i_amm_fee,sigma,demand,cex_fee,amm_fee,"
       << kSummaryCsvHeader << '\n';
    for (const auto& c : surf.cells) {
      os << c.i_sigma << ',' << c.i_demand << ',' << c.i_cex_fee << ','
         << c.i_amm_fee << ',' << fmt(c.sigma) << ',' << fmt(c.demand) << ','
         << fmt(c.cex_fee) << ',' << fmt(c.amm_fee) << ',';
      append_summary_row(os, c.stats);
      os << '\n';
    }
  });

  amm::csv::atomic_write(dir / "optimal_fee.csv", [&](std::ostream& os) {
    os << "sigma,demand,cex_fee,amm_fee,mean_hedged_pnl,halt\n";
    for (size_t is = 0; is < axes.sigma.size(); ++is)
      for (size_t id = 0; id < axes.demand.size(); ++id)
        for (size_t ie0 = 0; ie0 < axes.cex_fee.size(); ++ie0) {
          auto opt = amm::optimal_fee(surf, int(is), int(id), int(ie0));
          os << fmt(axes.sigma[is]) << ',' << fmt(axes.demand[id]) << ','
             << fmt(axes.cex_fee[ie0]) << ',' << fmt(opt.amm_fee) << ','
             << fmt(opt.mean_pnl) << ',' << (opt.halt ? 1 : 0) << '\n';
        }
  });

  if (o.regret_at_bps >= 0.0) {
    auto cells = amm::regret(surf, o.regret_at_bps * 1e-4);
    amm::csv::atomic_write(dir / "regret.csv", [&](std::ostream& os) {
      os << "sigma,demand,cex_fee,fixed_amm_fee,optimal_amm_fee,regret\n";
      for (const auto& r : cells)
        os << fmt(r.sigma) << ',' << fmt(r.demand) << ',' << fmt(r.cex_fee)
           << ',' << fmt(o.regret_at_bps * 1e-4) << ','
           << fmt(r.optimal_amm_fee) << ',' << fmt(r.regret) << '\n';
    });
  }
  return 0;
}

// --------------------------------------------------------------- calibrate

struct CalibrateOptsCli {
  CommonOpts common;
  std::string cex_file, dex_file;
  std::string sigma_axis = "0.01:0.09:5";
  std::string cex_axis = "5,10,20,40";
  std::string demand_axis = "2000,8000,32000";
  double amm_bps = 30.0;
  int paths_per_point = 8;
  int refine = 1;
  int bins = 101;
  bool historical_prices = false;
};

int run_calibrate(const CalibrateOptsCli& o) {
  amm::CalibrationGrid grid;
  grid.sigma = parse_axis(o.sigma_axis);
  grid.cex_fee = parse_axis(o.cex_axis, 1e-4);
  grid.demand = parse_axis(o.demand_axis);

  amm::CalibrationOptions opts;
  opts.amm_fee = o.amm_bps * 1e-4;
  opts.paths_per_point = o.paths_per_point;
  opts.bins = o.bins;
  opts.refine_passes = o.refine;
  opts.historical_prices = o.historical_prices;
  opts.seed = o.common.seed;
  opts.workers = o.common.workers;

  auto data = amm::load_market_data(o.cex_file, o.dex_file);

  fs::path dir = prepare_out_dir(o.common);
  write_manifest(dir, "calibrate", o.common,
                 {{"cex_file", o.cex_file},
                  {"dex_file", o.dex_file},
                  {"rows", data.t_ms.size()},
                  {"sigma_axis", grid.sigma},
                  {"cex_fee_axis", grid.cex_fee},
                  {"demand_axis", grid.demand},
                  {"amm_fee", opts.amm_fee},
                  {"paths_per_point", opts.paths_per_point},
                  {"bins", opts.bins},
                  {"refine_passes", opts.refine_passes},
                  {"historical_prices", opts.historical_prices}});

  auto res = amm::calibrate(data, grid, opts);

  json trace = json::array();
  for (const auto& p : res.trace)
    trace.push_back({{"sigma", p.sigma},
                     {"cex_fee", p.cex_fee},
                     {"demand", p.demand},
                     {"distance", p.distance}});
  write_json(dir / "calibration.json",
             {{"sigma", res.sigma},
              {"cex_fee", res.cex_fee},
              {"demand", res.demand},
              {"distance", res.distance},
              {"observations", data.t_ms.size()},
              {"spec", {{"lo", res.spec.lo}, {"hi", res.spec.hi}, {"bins", res.spec.bins}}},
              {"points_evaluated", res.trace.size()},
              {"trace", std::move(trace)}});

  amm::csv::atomic_write(dir / "fit_histogram.csv", [&](std::ostream& os) {
    os << "bin_left,bin_right,empirical_mass,fitted_mass\n";
    auto emp = res.empirical.mass();
    auto fit = res.fitted.mass();
    for (int i = 0; i < res.spec.bins; ++i)
      os << fmt(res.empirical.bin_left(i)) << ','
         << fmt(res.empirical.bin_right(i)) << ',' << fmt(emp[size_t(i)])
         << ',' << fmt(fit[size_t(i)]) << '\n';
  });

  std::printf("calibrate: sigma %s, cex fee %s bps, demand %s/day "
              "(distance %s, %zu points)\n",
              fmt(res.sigma).c_str(), fmt(res.cex_fee * 1e4).c_str(),
              fmt(res.demand).c_str(), fmt(res.distance).c_str(),
              res.trace.size());
  return 0;
}

// ---------------------------------------------------------------- backtest

struct BacktestOptsCli {
  CommonOpts common;
  FeeOpts fees;
  std::string cex_file, dex_file;
  double x0 = 3.0e7, y0 = 1.0e4;
  double demand = 10000.0;
  double noise = 0.0;
};

int run_backtest(const BacktestOptsCli& o) {
  amm::SimConfig cfg;
  cfg.fees = o.fees.schedule();
  cfg.buy_demand = 0.5 * o.demand;
  cfg.sell_demand = 0.5 * o.demand;
  cfg.noise_volume = o.noise;
  cfg.seed = o.common.seed;

  amm::PricePath cex;
  if (!o.dex_file.empty()) {
    auto data = amm::load_market_data(o.cex_file, o.dex_file);
    cex = amm::cex_path(data);
    cfg.reserve_x0 = data.mean_reserve_x;
    cfg.reserve_y0 = data.mean_reserve_y;
  } else {
    cex = amm::load_price_csv(o.cex_file);
    cfg.reserve_x0 = o.x0;
    cfg.reserve_y0 = o.y0;
  }

  fs::path dir = prepare_out_dir(o.common);
  write_manifest(dir, "backtest", o.common,
                 {{"cex_file", o.cex_file},
                  {"dex_file", o.dex_file},
                  {"steps", cex.steps()},
                  {"dt_days", cex.dt},
                  {"reserve_x0", cfg.reserve_x0},
                  {"reserve_y0", cfg.reserve_y0},
                  {"demand_per_day", o.demand},
                  {"noise_per_day", o.noise},
                  {"fees", fees_json(cfg.fees)}});

  auto bt = amm::backtest(std::move(cex), cfg);
  const auto& b = bt.bounds;
  const int64_t step_ms = std::llround(bt.cex.dt * 86400000.0);

  amm::csv::atomic_write(dir / "backtest.csv", [&](std::ostream& os) {
    os << "step,timestamp_ms,cex_price,pool_price,pre_log_ratio,post_log_ratio,"
          "in_profit,in_buysell,arbed,unhedged_pnl,hedged_pnl,tracking_error,"
          "fees\n";
    for (int i = 1; i <= bt.config.n_steps; ++i) {
      size_t k = size_t(i) - 1;
      double s = bt.cex.values[size_t(i)];
      double pre = bt.path.pre_log_ratio[k];
      double post = bt.path.post_log_ratio[k];
      double ratio = std::exp(pre);
      os << i << ',' << bt.cex.t0_ms + int64_t(i) * step_ms << ',' << fmt(s)
         << ',' << fmt(std::exp(post) * s) << ',' << fmt(pre) << ','
         << fmt(post) << ','
         << (ratio >= b.profit_low && ratio < b.profit_high ? 1 : 0) << ','
         << (ratio >= b.sell_bound && ratio < b.buy_bound ? 1 : 0) << ','
         << (!(ratio >= b.arb_low && ratio < b.arb_high) ? 1 : 0) << ','
         << fmt(bt.path.unhedged[size_t(i)]) << ','
         << fmt(bt.path.hedged[size_t(i)]) << ','
         << fmt(bt.path.tracking[size_t(i)]) << ','
         << fmt(bt.path.fees[size_t(i)]) << '\n';
    }
  });

  const auto& st = bt.path.stats;
  json vol = json::array(), fees_by = json::array();
  for (size_t c = 0; c < amm::kTraderClassCount; ++c) {
    vol.push_back(st.volume_by_class[c]);
    fees_by.push_back(st.fees_by_class[c]);
  }
  write_json(dir / "backtest_summary.json",
             {{"steps", bt.config.n_steps},
              {"horizon_days", bt.config.horizon},
              {"unhedged_pnl", st.unhedged_pnl},
              {"hedged_pnl", st.hedged_pnl},
              {"tracking_error", st.tracking_error},
              {"fees", st.fees_total},
              {"volume", st.volume_total()},
              {"volume_by_class", std::move(vol)},
              {"fees_by_class", std::move(fees_by)},
              {"p_profit", double(st.in_profit) / double(st.samples)},
              {"p_buysell", double(st.in_buysell) / double(st.samples)},
              {"p_arb", double(st.arbed) / double(st.samples)},
              {"trades", bt.path.trades.size()},
              {"bounds", bounds_json(b)},
              {"fees_config", fees_json(bt.config.fees)}});

  std::printf("backtest: %d steps, hedged pnl %s, fees %s\n",
              bt.config.n_steps, fmt(st.hedged_pnl).c_str(),
              fmt(st.fees_total).c_str());
  return 0;
}

// ------------------------------------------------------------------- stats

struct StatsOptsCli {
  CommonOpts common;
  FeeOpts fees;
  std::string cex_file, dex_file;
  int bins = 101;
};

int run_stats(const StatsOptsCli& o) {
  auto data = amm::load_market_data(o.cex_file, o.dex_file);
  auto lr = amm::empirical_log_ratio(data);

  double mean = 0.0;
  for (double v : lr) mean += v;
  mean /= double(lr.size());
  double var = 0.0, lo = lr[0], hi = lr[0];
  for (double v : lr) {
    var += (v - mean) * (v - mean);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  var = lr.size() > 1 ? var / double(lr.size() - 1) : 0.0;

  // Realized CEX volatility per sqrt(day), from one-step log returns.
  double rv = 0.0;
  for (size_t i = 1; i < data.cex_price.size(); ++i) {
    double r = std::log(data.cex_price[i] / data.cex_price[i - 1]);
    rv += r * r;
  }
  double cex_sigma =
      std::sqrt(rv / (double(data.cex_price.size() - 1) * data.dt));

  auto b = amm::region_bounds(o.fees.schedule());
  int64_t in_profit = 0, in_buysell = 0, arbed = 0;
  for (double v : lr) {
    double ratio = std::exp(v);
    if (ratio >= b.profit_low && ratio < b.profit_high) ++in_profit;
    if (ratio >= b.sell_bound && ratio < b.buy_bound) ++in_buysell;
    if (!(ratio >= b.arb_low && ratio < b.arb_high)) ++arbed;
  }

  fs::path dir = prepare_out_dir(o.common);
  write_manifest(dir, "stats", o.common,
                 {{"cex_file", o.cex_file},
                  {"dex_file", o.dex_file},
                  {"bins", o.bins},
                  {"fees", fees_json(o.fees.schedule())}});

  double n = double(lr.size());
  write_json(dir / "ratio_stats.json",
             {{"rows", lr.size()},
              {"dt_days", data.dt},
              {"start_ms", data.t_ms.front()},
              {"end_ms", data.t_ms.back()},
              {"mean_reserve_x", data.mean_reserve_x},
              {"mean_reserve_y", data.mean_reserve_y},
              {"mean_log_ratio", mean},
              {"sd_log_ratio", std::sqrt(var)},
              {"min_log_ratio", lo},
              {"max_log_ratio", hi},
              {"cex_sigma_per_sqrt_day", cex_sigma},
              {"p_profit", double(in_profit) / n},
              {"p_buysell", double(in_buysell) / n},
              {"p_arb", double(arbed) / n},
              {"bounds", bounds_json(b)}});

  double span = hi > lo ? hi - lo : 1e-6;
  amm::Histogram h({lo - 0.005 * span, hi + 0.005 * span, o.bins});
  for (double v : lr) h.add(v);
  write_histogram_csv(dir / "empirical_histogram.csv", h, true);

  std::printf("stats: %zu rows, sd(log ratio) %s, cex sigma %s/sqrt(day)\n",
              lr.size(), fmt(std::sqrt(var)).c_str(), fmt(cex_sigma).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo toolkit for a constant-product AMM trading "
               "alongside a CEX"};
  app.require_subcommand(1);
  app.set_version_flag("--version", amm::kVersion);
  app.set_config("--config", "", "read options from an INI/TOML file");

  SimulateOpts sim_o;
  SweepOptsCli sweep_o;
  CalibrateOptsCli cal_o;
  BacktestOptsCli bt_o;
  StatsOptsCli stats_o;

  auto add_common = [](CLI::App* cmd, CommonOpts& c) {
    cmd->fallthrough(true);  // lets --config (held by the parent) follow the subcommand
    cmd->add_option("--out-dir", c.out_dir, "output directory")
        ->envname("AMMSIM_OUT_DIR")
        ->capture_default_str();
    cmd->add_option("--seed", c.seed, "root RNG seed")->capture_default_str();
    cmd->add_option("--workers", c.workers,
                    "worker threads (0 = all hardware threads)")
        ->capture_default_str();
  };

  auto* sim = app.add_subcommand(
      "simulate", "run a path ensemble and summarize LP profitability");
  add_common(sim, sim_o.common);
  add_fee_flags(sim, sim_o.fees);
  sim->add_option("--paths", sim_o.paths, "number of Monte Carlo paths")
      ->capture_default_str();
  sim->add_option("--steps", sim_o.steps, "steps per path")->capture_default_str();
  sim->add_option("--horizon", sim_o.horizon, "horizon in days")
      ->capture_default_str();
  sim->add_option("--x0", sim_o.x0, "initial numeraire reserve")
      ->capture_default_str();
  sim->add_option("--y0", sim_o.y0, "initial risky reserve")->capture_default_str();
  sim->add_option("--price0", sim_o.price0, "initial CEX price")
      ->capture_default_str();
  sim->add_option("--sigma", sim_o.sigma, "volatility per sqrt(day)")
      ->capture_default_str();
  sim->add_option("--mu", sim_o.mu, "drift per day")->capture_default_str();
  sim->add_option("--ou-kappa", sim_o.ou_kappa,
                  "mean-reversion rate per day (enables the OU price model)");
  sim->add_option("--ou-mean", sim_o.ou_mean,
                  "OU long-run price level (default: --price0)");
  sim->add_option("--demand", sim_o.demand,
                  "total fundamental flow per day, split across both sides")
      ->capture_default_str();
  sim->add_option("--noise", sim_o.noise, "uninformed round-trip flow per day")
      ->capture_default_str();
  sim->add_option("--cex-file", sim_o.cex_file,
                  "drive prices from a CSV (timestamp,price) instead of a model");
  sim->add_option("--ratio-bins", sim_o.ratio_bins, "price-ratio histogram bins")
      ->capture_default_str();
  sim->add_option("--pnl-bins", sim_o.pnl_bins, "PnL histogram bins")
      ->capture_default_str();
  sim->add_flag("--post-trade", sim_o.post_trade,
                "bin end-of-step ratios instead of pre-trade ratios");

  auto* swp = app.add_subcommand(
      "sweep", "map expected LP profit over a (fee, sigma, demand, cex fee) grid");
  add_common(swp, sweep_o.common);
  add_fee_flags(swp, sweep_o.fees);
  swp->add_option("--amm-fee-bps-axis", sweep_o.amm_axis,
                  "pool fee axis in bps: 'a,b,c' or 'lo:hi:n'")
      ->capture_default_str();
  swp->add_option("--sigma-axis", sweep_o.sigma_axis, "volatility axis")
      ->capture_default_str();
  swp->add_option("--demand-axis", sweep_o.demand_axis,
                  "total daily fundamental flow axis")
      ->capture_default_str();
  swp->add_option("--cex-fee-bps-axis", sweep_o.cex_axis, "CEX fee axis in bps")
      ->capture_default_str();
  swp->add_option("--paths-per-cell", sweep_o.paths_per_cell,
                  "Monte Carlo paths per grid cell")
      ->capture_default_str();
  swp->add_option("--steps", sweep_o.steps, "steps per path")->capture_default_str();
  swp->add_option("--horizon", sweep_o.horizon, "horizon in days")
      ->capture_default_str();
  swp->add_option("--x0", sweep_o.x0, "initial numeraire reserve")
      ->capture_default_str();
  swp->add_option("--y0", sweep_o.y0, "initial risky reserve")
      ->capture_default_str();
  swp->add_option("--price0", sweep_o.price0, "initial CEX price")
      ->capture_default_str();
  swp->add_option("--noise", sweep_o.noise, "uninformed round-trip flow per day")
      ->capture_default_str();
  swp->add_option("--regret-at-bps", sweep_o.regret_at_bps,
                  "also report regret of holding this fixed pool fee");
  swp->add_flag("--resume", sweep_o.resume,
                "reuse finished cells from cells.jsonl in the output directory");

  auto* cal = app.add_subcommand(
      "calibrate", "fit (sigma, cex fee, demand) to observed CEX/AMM data");
  add_common(cal, cal_o.common);
  cal->add_option("--cex-file", cal_o.cex_file, "CEX price CSV (timestamp,price)")
      ->required();
  cal->add_option("--dex-file", cal_o.dex_file,
                  "pool reserve CSV (timestamp,reserve_x,reserve_y)")
      ->required();
  cal->add_option("--sigma-axis", cal_o.sigma_axis, "volatility grid")
      ->capture_default_str();
  cal->add_option("--cex-fee-bps-axis", cal_o.cex_axis, "CEX fee grid in bps")
      ->capture_default_str();
  cal->add_option("--demand-axis", cal_o.demand_axis,
                  "total daily fundamental flow grid")
      ->capture_default_str();
  cal->add_option("--amm-fee-bps", cal_o.amm_bps, "the pool's posted fee, bps")
      ->capture_default_str();
  cal->add_option("--paths-per-point", cal_o.paths_per_point,
                  "simulated paths per grid point")
      ->capture_default_str();
  cal->add_option("--refine", cal_o.refine, "local refinement passes")
      ->capture_default_str();
  cal->add_option("--bins", cal_o.bins, "histogram bins for the fit distance")
      ->capture_default_str();
  cal->add_flag("--historical-prices", cal_o.historical_prices,
                "drive simulations with the observed CEX path (single sigma)");

  auto* bt = app.add_subcommand(
      "backtest", "replay the trade dynamics against an observed price series");
  add_common(bt, bt_o.common);
  add_fee_flags(bt, bt_o.fees);
  bt->add_option("--cex-file", bt_o.cex_file, "CEX price CSV (timestamp,price)")
      ->required();
  bt->add_option("--dex-file", bt_o.dex_file,
                 "pool reserve CSV; sizes the pool from its mean reserves");
  bt->add_option("--x0", bt_o.x0, "initial numeraire reserve (no --dex-file)")
      ->capture_default_str();
  bt->add_option("--y0", bt_o.y0, "initial risky reserve (no --dex-file)")
      ->capture_default_str();
  bt->add_option("--demand", bt_o.demand, "total fundamental flow per day")
      ->capture_default_str();
  bt->add_option("--noise", bt_o.noise, "uninformed round-trip flow per day")
      ->capture_default_str();

  auto* stc = app.add_subcommand(
      "stats", "summarize the observed CEX/AMM price-ratio distribution");
  add_common(stc, stats_o.common);
  add_fee_flags(stc, stats_o.fees);
  stc->add_option("--cex-file", stats_o.cex_file, "CEX price CSV")->required();
  stc->add_option("--dex-file", stats_o.dex_file, "pool reserve CSV")->required();
  stc->add_option("--bins", stats_o.bins, "histogram bins")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (sim->parsed()) return run_simulate(sim_o);
    if (swp->parsed()) return run_sweep(sweep_o);
    if (cal->parsed()) return run_calibrate(cal_o);
    if (bt->parsed()) return run_backtest(bt_o);
    if (stc->parsed()) return run_stats(stats_o);
  } catch (const amm::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
