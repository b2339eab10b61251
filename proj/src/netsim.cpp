#include "spatraf/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <boost/math/distributions/students_t.hpp>

#include "parallel.hpp"
#include "spatraf/error.hpp"
#include "spatraf/measures.hpp"

namespace spatraf::netsim {
namespace {

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double link_distance(const ChannelModel& ch, Point a, Point b) {
  const double dh = ch.bs_height_m - ch.ue_height_m;
  return std::sqrt(dot(a - b, a - b) + dh * dh);
}

}  // namespace

double ChannelModel::noise_dbm() const { return noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz()); }

double path_loss_db(const ChannelModel& channel, double d, bool los) {
  d = std::max(d, channel.min_distance_m);
  const double lf = std::log10(channel.carrier_ghz);
  if (los) return 22.0 * std::log10(d) + 28.0 + 20.0 * lf;
  return 36.7 * std::log10(d) + 22.7 + 26.0 * lf;
}

double los_probability(double d) {
  if (!(d > 0.0)) return 1.0;
  const double e = std::exp(-d / 36.0);
  return std::min(18.0 / d, 1.0) * (1.0 - e) + e;
}

std::vector<LinkState> draw_links(const assoc::NetworkLayout& layout, const ChannelModel& channel,
                                  Point ue, RandomStream& los_rng, RandomStream& shadow_rng) {
  std::vector<LinkState> links;
  links.reserve(layout.stations().size());
  for (const auto& bs : layout.stations()) {
    const double u = los_rng.uniform();
    const double z = shadow_rng.normal();
    LinkState l;
    l.los = u < los_probability(distance(bs.position, ue));
    if (channel.shadowing) l.shadow_db = z * (l.los ? channel.los_shadow_std_db : channel.nlos_shadow_std_db);
    links.push_back(l);
  }
  return links;
}

double received_power_dbm(const assoc::BaseStation& bs, const ChannelModel& channel, Point ue,
                          const LinkState& link) {
  return bs.eirp_dbm() + channel.ue_gain_dbi - path_loss_db(channel, link_distance(channel, bs.position, ue), link.los) -
         link.shadow_db;
}

SinrResult sinr(const assoc::NetworkLayout& layout, const ChannelModel& channel, Point ue,
                std::span<const LinkState> links) {
  const auto& st = layout.stations();
  if (links.size() != st.size()) throw Error(ErrorCode::InvalidArgument, "sinr: one link state per station");
  SinrResult r;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> rx(st.size());
  for (std::size_t k = 0; k < st.size(); ++k) {
    rx[k] = received_power_dbm(st[k], channel, ue, links[k]);
    if (rx[k] > best) {
      best = rx[k];
      r.serving = k;
    }
  }
  double interference = dbm_to_mw(channel.noise_dbm());
  for (std::size_t k = 0; k < st.size(); ++k)
    if (k != r.serving) interference += dbm_to_mw(rx[k]);
  r.signal_dbm = best;
  r.sinr_db = best - 10.0 * std::log10(interference);
  return r;
}

DropResult evaluate(const assoc::NetworkLayout& layout, const PointPattern& ues, const ChannelModel& channel,
                    double sinr_threshold_db, RandomStream& los_rng, RandomStream& shadow_rng) {
  DropResult out;
  const std::size_t n = ues.size();
  out.serving.resize(n);
  out.sinr_db.resize(n);
  out.rate_bps.resize(n);
  std::vector<std::size_t> load(layout.stations().size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto links = draw_links(layout, channel, ues[i], los_rng, shadow_rng);
    const auto r = sinr(layout, channel, ues[i], links);
    out.serving[i] = r.serving;
    out.sinr_db[i] = r.sinr_db;
    ++load[r.serving];
  }
  std::size_t covered = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double share = channel.bandwidth_hz() / static_cast<double>(load[out.serving[i]]);
    out.rate_bps[i] = share * std::log2(1.0 + std::pow(10.0, out.sinr_db[i] / 10.0));
    if (out.sinr_db[i] >= sinr_threshold_db) ++covered;
  }
  if (n > 0) {
    out.mean_rate_bps = mean_and_se(out.rate_bps).first;
    out.coverage_prob = static_cast<double>(covered) / static_cast<double>(n);
  }
  return out;
}

DropResult run_drop(const DropSpec& spec, const traffic::TGIP& tgip, const RandomStream& master,
                    std::uint64_t drop) {
  const auto geo = assoc::GeometryChannel{spec.channel.carrier_ghz, 3.67};
  const auto real = traffic::realize(spec.layout, tgip, spec.mean_ues, master, drop, geo);
  RandomStream los_rng = master.substream(drop, Substream::LosState);
  RandomStream shadow_rng = master.substream(drop, Substream::Shadowing);
  auto out = evaluate(real.layout, real.traffic.ues, spec.channel, spec.sinr_threshold_db, los_rng, shadow_rng);
  if (spec.measure_stats) {
    out.measured_c = measures::normalized_cov(real.traffic.ues, spec.measure);
    out.measured_rho = assoc::correlation_coefficient(assoc::CellMap(real.layout, geo), real.traffic.ues);
  }
  out.seed = master.seed();
  out.drop = drop;
  return out;
}

std::pair<double, double> mean_and_se(std::span<const double> v) {
  if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const double n = static_cast<double>(v.size());
  const double m = sum / n;
  if (v.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

double paired_p_greater(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw Error(ErrorCode::InvalidArgument, "paired test needs equal samples, n >= 2");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = b[i] - a[i];
  const auto [m, se] = mean_and_se(d);
  if (se == 0.0) return m > 0.0 ? 0.0 : 1.0;
  const boost::math::students_t dist(static_cast<double>(d.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, m / se));
}

namespace {

void aggregate(KpiPoint& p) {
  std::tie(p.mean_rate_bps, p.se_rate) = mean_and_se(p.drop_rate);
  std::tie(p.coverage_prob, p.se_cov) = mean_and_se(p.drop_cov);
  p.measured_c = mean_and_se(p.drop_c).first;
  p.measured_rho = mean_and_se(p.drop_rho).first;
  p.drops = p.drop_rate.size();
}

}  // namespace

std::vector<KpiPoint> sweep(const DropSpec& spec, const std::vector<Target>& targets,
                            const calib::CalibrationTable& ppp_table,
                            const calib::CalibrationTable& lattice_table, std::size_t drops,
                            std::uint64_t seed, std::size_t workers,
                            const calib::InvertOptions& invert_options) {
  if (drops < 1) throw Error(ErrorCode::InvalidArgument, "sweep needs at least one drop");
  std::vector<KpiPoint> points(targets.size());
  std::vector<std::size_t> active;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    auto& p = points[t];
    p.target = targets[t];
    p.seed = seed;
    try {
      p.tgip = calib::invert(ppp_table, lattice_table, targets[t].c, targets[t].rho, invert_options).tgip;
      p.drop_rate.assign(drops, 0.0);
      p.drop_cov.assign(drops, 0.0);
      p.drop_c.assign(drops, 0.0);
      p.drop_rho.assign(drops, 0.0);
      active.push_back(t);
    } catch (const InfeasibleError& e) {
      p.feasible = false;
      p.note = e.what();
      const double nan = std::numeric_limits<double>::quiet_NaN();
      p.measured_c = p.measured_rho = p.mean_rate_bps = p.se_rate = p.coverage_prob = p.se_cov = nan;
    }
  }
  const RandomStream master(seed, 0);
  detail::parallel_for(active.size() * drops, workers, [&](std::size_t k) {
    auto& p = points[active[k / drops]];
    const std::size_t d = k % drops;
    const auto r = run_drop(spec, p.tgip, master, d);
    p.drop_rate[d] = r.mean_rate_bps;
    p.drop_cov[d] = r.coverage_prob;
    p.drop_c[d] = r.measured_c;
    p.drop_rho[d] = r.measured_rho;
  });
  for (std::size_t t : active) aggregate(points[t]);
  return points;
}

KpiPoint simulate(const DropSpec& spec, const traffic::TGIP& tgip, std::size_t drops, std::uint64_t seed,
                  std::size_t workers) {
  if (drops < 1) throw Error(ErrorCode::InvalidArgument, "simulate needs at least one drop");
  tgip.validate();
  KpiPoint p;
  p.tgip = tgip;
  p.seed = seed;
  p.target = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  p.drop_rate.assign(drops, 0.0);
  p.drop_cov.assign(drops, 0.0);
  p.drop_c.assign(drops, 0.0);
  p.drop_rho.assign(drops, 0.0);
  const RandomStream master(seed, 0);
  detail::parallel_for(drops, workers, [&](std::size_t d) {
    const auto r = run_drop(spec, tgip, master, d);
    p.drop_rate[d] = r.mean_rate_bps;
    p.drop_cov[d] = r.coverage_prob;
    p.drop_c[d] = r.measured_c;
    p.drop_rho[d] = r.measured_rho;
  });
  aggregate(p);
  return p;
}

}  // namespace spatraf::netsim
