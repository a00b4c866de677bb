// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mamimo/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace mamimo {

using nlohmann::json;

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  auto parse = [&](const std::string& s) -> std::uint64_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw InvalidParameter("bad seed list entry '" + s + "'");
    }
    return std::stoull(s);
  };
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(parse(item));
    } else {
      const auto lo = parse(item.substr(0, dash));
      const auto hi = parse(item.substr(dash + 1));
      if (hi < lo) throw InvalidParameter("descending seed range '" + item + "'");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    }
  }
  if (seeds.empty()) throw InvalidParameter("empty seed list");
  return seeds;
}

ChannelRealization channel_for_seed(const SystemConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, 0xc4a77e1ULL));
  return sample_channel(cfg, rng);
}

std::uint64_t solver_seed(std::uint64_t seed) { return mix_seed(seed, 0x501eULL); }

std::uint64_t ber_seed(std::uint64_t seed, const std::string& scheme, double snr_db) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : scheme) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  const auto snr_key = static_cast<std::int64_t>(std::llround(snr_db * 1000.0));
  return mix_seed(mix_seed(seed, h), static_cast<std::uint64_t>(snr_key));
}

void parallel_for(int count, int workers, const std::function<void(int)>& body) {
  workers = std::clamp(workers, 1, std::max(count, 1));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

ConvergeRun run_converge(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds,
                         bool timing) {
  struct Job {
    std::uint64_t seed;
    int paths;
    int order;
  };
  std::vector<Job> jobs;
  for (auto seed : seeds) {
    for (int l : cfg.experiment.converge_paths) {
      for (int m : cfg.experiment.converge_orders) jobs.push_back({seed, l, m});
    }
  }
  std::vector<std::vector<ConvergeRow>> traces(jobs.size());
  std::vector<char> failed(jobs.size(), 0);
  parallel_for(static_cast<int>(jobs.size()), cfg.experiment.workers, [&](int i) {
    const Job& job = jobs[static_cast<std::size_t>(i)];
    SystemConfig sys = cfg.system;
    sys.paths = job.paths;
    sys.modulation_order = job.order;
    const ChannelRealization ch = channel_for_seed(sys, job.seed);
    SolverOptions opts = cfg.solver;
    opts.keep_history = false;
    const Initialization init = initialize(sys, opts.init, solver_seed(job.seed));
    const SolveResult res = optimize(sys, ch, init, opts);
    auto& rows = traces[static_cast<std::size_t>(i)];
    for (std::size_t n = 0; n < res.record.eta_history.size(); ++n) {
      const double wall = (timing && n > 0) ? res.record.wall_ms[n - 1] : 0.0;
      rows.push_back({job.seed, job.paths, job.order, static_cast<int>(n),
                      res.record.eta_history[n], wall});
    }
    failed[static_cast<std::size_t>(i)] = res.record.termination == Termination::solver_failure;
  });
  ConvergeRun run;
  for (auto& t : traces) run.rows.insert(run.rows.end(), t.begin(), t.end());
  run.solver_failure = std::any_of(failed.begin(), failed.end(), [](char f) { return f != 0; });
  return run;
}

namespace {

BerOptions ber_options(const ExperimentConfig& cfg) {
  BerOptions o;
  o.min_bits = cfg.experiment.min_bits;
  o.max_bits = cfg.experiment.max_bits;
  o.target_errors = cfg.experiment.target_errors;
  o.tx_power = cfg.system.tx_power;
  o.gain_reference = cfg.system.snr_gain_reference();
  return o;
}

BerSweep sweep(const ExperimentConfig& cfg, const std::vector<std::string>& schemes,
               const std::vector<double>& snr_db, const std::vector<std::uint64_t>& seeds) {
  for (const auto& s : schemes) {
    if (!is_known_scheme(s)) throw InvalidParameter("unknown scheme '" + s + "'");
  }
  cfg.system.validate();
  const SmCodebook cb(cfg.system.tx_antennas, cfg.system.modulation_order, cfg.system.constellation);
  const BerOptions bopts = ber_options(cfg);

  BerSweep out;
  out.per_channel.assign(schemes.size(), std::vector<ChannelBer>(seeds.size()));
  parallel_for(static_cast<int>(seeds.size()), cfg.experiment.workers, [&](int i) {
    const auto seed = seeds[static_cast<std::size_t>(i)];
    const ChannelRealization ch = channel_for_seed(cfg.system, seed);
    SolverOptions opts = cfg.solver;
    opts.keep_history = false;
    for (std::size_t s = 0; s < schemes.size(); ++s) {
      const SchemeResult r = run_scheme(schemes[s], cfg.system, ch, opts, solver_seed(seed));
      const CMatrix h = assemble_channel(r.layout, ch, cfg.system.wavelength);
      ChannelBer& cell = out.per_channel[s][static_cast<std::size_t>(i)];
      cell.d_min = r.d_min;
      cell.iterations = r.record.iterations;
      cell.solver_failure = r.solver_failure;
      for (double snr : snr_db) {
        cell.ber.push_back(simulate_ber(h, r.w, cb, snr, bopts, ber_seed(seed, schemes[s], snr)));
      }
    }
  });

  for (std::size_t s = 0; s < schemes.size(); ++s) {
    for (std::size_t k = 0; k < snr_db.size(); ++k) {
      BerPoint p;
      p.scheme = schemes[s];
      p.paths = cfg.system.paths;
      p.snr_db = snr_db[k];
      p.channels = static_cast<int>(seeds.size());
      double sum = 0.0, sum_sq = 0.0, dsum = 0.0;
      for (const auto& cell : out.per_channel[s]) {
        const BerResult& b = cell.ber[k];
        sum += b.ber;
        sum_sq += b.ber * b.ber;
        dsum += cell.d_min;
        p.total_bits += b.total_bits;
        p.bit_errors += b.bit_errors;
        out.solver_failure = out.solver_failure || cell.solver_failure;
      }
      const double n = static_cast<double>(p.channels);
      p.mean_ber = sum / n;
      p.mean_dmin = dsum / n;
      const double var = p.channels > 1 ? std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0)) : 0.0;
      p.std_err = std::sqrt(var / n);
      out.points.push_back(p);
    }
  }
  return out;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void write_header(std::ostream& os, const char* command, const ExperimentConfig& cfg,
                  const std::vector<std::uint64_t>& seeds) {
  os << "# mamimo " << command << "\n";
  os << "# config_hash: " << config_hash(cfg) << "\n";
  os << "# seeds:";
  for (std::size_t i = 0; i < seeds.size(); ++i) os << (i ? "," : " ") << seeds[i];
  os << "\n";
}

json complex_matrix(const CMatrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ii = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ii.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return {{"re", re}, {"im", im}};
}

json complex_vector(const CVector& v) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return {{"re", re}, {"im", im}};
}

CMatrix read_matrix(const json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  CMatrix m(static_cast<Eigen::Index>(re.size()), re.empty() ? 0 : static_cast<Eigen::Index>(re[0].size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = cdouble(re[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>(),
                        im[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>());
    }
  }
  return m;
}

CVector read_vector(const json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  CVector v(static_cast<Eigen::Index>(re.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) = cdouble(re[static_cast<std::size_t>(i)].get<double>(), im[static_cast<std::size_t>(i)].get<double>());
  }
  return v;
}

}  // namespace

BerSweep run_ber_vs_snr(const ExperimentConfig& cfg, const std::vector<std::string>& schemes,
                        const std::vector<double>& snr_db, const std::vector<std::uint64_t>& seeds) {
  return sweep(cfg, schemes, snr_db, seeds);
}

std::vector<BerSweep> run_ber_vs_paths(const ExperimentConfig& cfg,
                                       const std::vector<std::string>& schemes,
                                       const std::vector<int>& paths, double snr_db,
                                       const std::vector<std::uint64_t>& seeds) {
  std::vector<BerSweep> out;
  for (int l : paths) {
    ExperimentConfig c = cfg;
    c.system.paths = l;
    out.push_back(sweep(c, schemes, {snr_db}, seeds));
  }
  return out;
}

void write_converge_csv(std::ostream& os, const ExperimentConfig& cfg,
                        const std::vector<std::uint64_t>& seeds, const ConvergeRun& run) {
  write_header(os, "converge", cfg, seeds);
  os << "seed,L,M,iteration,eta,wall_ms\n";
  for (const auto& r : run.rows) {
    os << r.seed << ',' << r.paths << ',' << r.order << ',' << r.iteration << ',' << fmt(r.eta)
       << ',' << fmt(r.wall_ms) << '\n';
  }
}

void write_ber_snr_csv(std::ostream& os, const ExperimentConfig& cfg,
                       const std::vector<std::uint64_t>& seeds, const BerSweep& sweep) {
  write_header(os, "ber-vs-snr", cfg, seeds);
  os << "scheme,snr_db,ber,total_bits,channels,bit_errors,std_err,mean_dmin\n";
  for (const auto& p : sweep.points) {
    os << p.scheme << ',' << fmt(p.snr_db) << ',' << fmt(p.mean_ber) << ',' << p.total_bits << ','
       << p.channels << ',' << p.bit_errors << ',' << fmt(p.std_err) << ',' << fmt(p.mean_dmin)
       << '\n';
  }
}

void write_ber_paths_csv(std::ostream& os, const ExperimentConfig& cfg,
                         const std::vector<std::uint64_t>& seeds,
                         const std::vector<BerSweep>& sweeps) {
  write_header(os, "ber-vs-paths", cfg, seeds);
  os << "scheme,L,snr_db,ber,total_bits,channels,bit_errors,std_err,mean_dmin\n";
  std::vector<BerPoint> rows;
  for (const auto& s : sweeps) rows.insert(rows.end(), s.points.begin(), s.points.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const BerPoint& a, const BerPoint& b) { return a.scheme < b.scheme; });
  for (const auto& p : rows) {
    os << p.scheme << ',' << p.paths << ',' << fmt(p.snr_db) << ',' << fmt(p.mean_ber) << ','
       << p.total_bits << ',' << p.channels << ',' << p.bit_errors << ',' << fmt(p.std_err) << ','
       << fmt(p.mean_dmin) << '\n';
  }
}

std::string iteration_json(const IterationLog& log) {
  return json{{"n", log.n}, {"eta", log.eta}, {"wall_ms", log.wall_ms}}.dump();
}

std::string single_run_json(const ExperimentConfig& cfg, std::uint64_t seed) {
  const SystemConfig& sys = cfg.system;
  const ChannelRealization ch = channel_for_seed(sys, seed);
  SolverOptions opts = cfg.solver;
  opts.keep_history = true;
  const SolveResult res = optimize_multistart(sys, ch, opts, solver_seed(seed));
  const SmCodebook cb(sys.tx_antennas, sys.modulation_order, sys.constellation);
  const double iota = static_cast<double>(cb.pairs().size());

  json j;
  j["format"] = "mamimo-single-run/1";
  j["config"] = json::parse(config_to_json(cfg));
  j["seed"] = seed;
  j["channel"] = {{"aod", ch.aod()}, {"aoa", ch.aoa()}, {"prm", complex_matrix(ch.prm())}};
  json hist;
  hist["eta"] = res.record.eta_history;
  hist["block_eta"] = res.record.block_eta;
  hist["u"] = res.record.u_history;
  hist["v"] = res.record.v_history;
  json ws = json::array();
  for (const auto& w : res.record.w_history) ws.push_back(complex_vector(w));
  hist["w"] = ws;
  j["record"] = {{"iterations", res.record.iterations},
                 {"termination", to_string(res.record.termination)},
                 {"solver_failures", res.record.solver_failures},
                 {"start", res.record.start},
                 {"history", hist}};
  j["result"] = {{"u", res.layout.u},
                 {"v", res.layout.v},
                 {"w", complex_vector(res.w.weights)},
                 {"d_min", res.d_min},
                 {"noise_power", sys.noise_power},
                 {"iota", iota},
                 {"pep_bound", pep_upper_bound(res.d_min, sys.noise_power, iota)}};
  return j.dump(1);
}

DumpCheck check_single_run_json(const std::string& dump) {
  const json j = json::parse(dump);
  const ExperimentConfig cfg = parse_config(j.at("config").dump());
  const auto& c = j.at("channel");
  const ChannelRealization ch(c.at("aod").get<std::vector<double>>(),
                              c.at("aoa").get<std::vector<double>>(), read_matrix(c.at("prm")));
  const auto& r = j.at("result");
  AntennaLayout layout{r.at("u").get<std::vector<double>>(), r.at("v").get<std::vector<double>>()};
  const CVector w = read_vector(r.at("w"));
  const SmCodebook cb(cfg.system.tx_antennas, cfg.system.modulation_order, cfg.system.constellation);

  DumpCheck out;
  out.stored_dmin = r.at("d_min").get<double>();
  out.recomputed_dmin = d_min(assemble_channel(layout, ch, cfg.system.wavelength), w, cb);
  out.layout_feasible = layout_feasible(layout, cfg.system);
  out.power_feasible = w.squaredNorm() <= cfg.system.tx_power + 1e-9;
  return out;
}

}  // namespace mamimo
