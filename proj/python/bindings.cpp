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


#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mamimo/experiments.hpp"

namespace py = pybind11;
using namespace mamimo;

namespace {

py::dict record_dict(const SolveRecord& r) {
  py::dict d;
  d["iterations"] = r.iterations;
  d["eta_history"] = r.eta_history;
  d["block_eta"] = r.block_eta;
  d["u_history"] = r.u_history;
  d["v_history"] = r.v_history;
  d["wall_ms"] = r.wall_ms;
  d["termination"] = to_string(r.termination);
  d["solver_failures"] = r.solver_failures;
  d["start"] = r.start;
  return d;
}

py::dict scheme_dict(const SchemeResult& r) {
  py::dict d;
  d["scheme"] = r.scheme;
  d["w"] = r.w.weights;
  d["u"] = r.layout.u;
  d["v"] = r.layout.v;
  d["d_min"] = r.d_min;
  d["solver_failure"] = r.solver_failure;
  d["record"] = record_dict(r.record);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spatial-modulation MIMO with movable antennas: channel, precoder and position solvers.";

  py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverFailure>(m, "SolverFailure", PyExc_RuntimeError);

  py::enum_<Constellation>(m, "Constellation").value("psk", Constellation::psk).value("qam", Constellation::qam);
  py::enum_<SnrReference>(m, "SnrReference")
      .value("receive", SnrReference::receive)
      .value("transmit", SnrReference::transmit);
  py::enum_<InitStrategy>(m, "InitStrategy").value("fpa", InitStrategy::fpa).value("random", InitStrategy::random);

  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init<>())
      .def_readwrite("tx_antennas", &SystemConfig::tx_antennas)
      .def_readwrite("rx_antennas", &SystemConfig::rx_antennas)
      .def_readwrite("modulation_order", &SystemConfig::modulation_order)
      .def_readwrite("wavelength", &SystemConfig::wavelength)
      .def_readwrite("min_spacing", &SystemConfig::min_spacing)
      .def_readwrite("tx_region", &SystemConfig::tx_region)
      .def_readwrite("rx_region", &SystemConfig::rx_region)
      .def_readwrite("tx_power", &SystemConfig::tx_power)
      .def_readwrite("noise_power", &SystemConfig::noise_power)
      .def_readwrite("distance", &SystemConfig::distance)
      .def_readwrite("reference_gain", &SystemConfig::reference_gain)
      .def_readwrite("pathloss_exponent", &SystemConfig::pathloss_exponent)
      .def_readwrite("paths", &SystemConfig::paths)
      .def_readwrite("constellation", &SystemConfig::constellation)
      .def_readwrite("snr_reference", &SystemConfig::snr_reference)
      .def("path_gain", &SystemConfig::path_gain)
      .def("noise_for_snr", &SystemConfig::noise_for_snr, py::arg("snr_db"))
      .def("validate", &SystemConfig::validate);

  py::class_<SolverOptions>(m, "SolverOptions")
      .def(py::init<>())
      .def_readwrite("kappa", &SolverOptions::kappa)
      .def_readwrite("max_iter", &SolverOptions::max_iter)
      .def_readwrite("sca_tol", &SolverOptions::sca_tol)
      .def_readwrite("sca_max_iter", &SolverOptions::sca_max_iter)
      .def_readwrite("inner_tol", &SolverOptions::inner_tol)
      .def_readwrite("prune_factor", &SolverOptions::prune_factor)
      .def_readwrite("starts", &SolverOptions::starts)
      .def_readwrite("init", &SolverOptions::init)
      .def_readwrite("strict_ordering", &SolverOptions::strict_ordering)
      .def_readwrite("optimize_tx", &SolverOptions::optimize_tx)
      .def_readwrite("optimize_rx", &SolverOptions::optimize_rx)
      .def_readwrite("keep_history", &SolverOptions::keep_history)
      .def_readwrite("gas_grid_step", &SolverOptions::gas_grid_step)
      .def_readwrite("position_scan", &SolverOptions::position_scan);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("system", &ExperimentConfig::system)
      .def_readwrite("solver", &ExperimentConfig::solver);

  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));
  m.def("config_to_json", &config_to_json, py::arg("config"));
  m.def("config_hash", &config_hash, py::arg("config"));

  py::class_<ChannelRealization>(m, "ChannelRealization")
      .def(py::init<std::vector<double>, std::vector<double>, CMatrix>(), py::arg("aod"), py::arg("aoa"),
           py::arg("prm"))
      .def_property_readonly("aod", &ChannelRealization::aod)
      .def_property_readonly("aoa", &ChannelRealization::aoa)
      .def_property_readonly("prm", &ChannelRealization::prm)
      .def_property_readonly("tx_paths", &ChannelRealization::tx_paths)
      .def_property_readonly("rx_paths", &ChannelRealization::rx_paths);

  py::class_<AntennaLayout>(m, "AntennaLayout")
      .def(py::init<>())
      .def(py::init([](std::vector<double> u, std::vector<double> v) { return AntennaLayout{std::move(u), std::move(v)}; }),
           py::arg("u"), py::arg("v"))
      .def_readwrite("u", &AntennaLayout::u)
      .def_readwrite("v", &AntennaLayout::v)
      .def(py::self == py::self);

  py::class_<SmCodebook>(m, "SmCodebook")
      .def(py::init<int, int, Constellation>(), py::arg("tx_antennas"), py::arg("order"),
           py::arg("constellation") = Constellation::psk)
      .def_property_readonly("size", &SmCodebook::size)
      .def_property_readonly("bits_per_symbol", &SmCodebook::bits_per_symbol)
      .def_property_readonly("pair_count", [](const SmCodebook& cb) { return cb.pairs().size(); })
      .def("symbol", [](const SmCodebook& cb, int i) { return CVector(cb.symbol(i).vector_form); }, py::arg("index"))
      .def("bits_of", &SmCodebook::bits_of, py::arg("index"))
      .def("index_of_bits", &SmCodebook::index_of_bits, py::arg("bits"));

  m.def("channel_for_seed", &channel_for_seed, py::arg("config"), py::arg("seed"));
  m.def("assemble_channel",
        py::overload_cast<const AntennaLayout&, const ChannelRealization&, double>(&assemble_channel),
        py::arg("layout"), py::arg("channel"), py::arg("wavelength"));
  m.def("layout_feasible", &layout_feasible, py::arg("layout"), py::arg("config"));
  m.def("d_min", &d_min, py::arg("h"), py::arg("w"), py::arg("codebook"));
  m.def("pep_upper_bound", &pep_upper_bound, py::arg("d_min"), py::arg("sigma2"), py::arg("iota"));

  m.def(
      "sca_beamforming",
      [](const CMatrix& h, const SmCodebook& cb, const CVector& w0, double power, double tol, int max_iter) {
        ScaOptions o;
        o.tol_outer = tol;
        o.max_iter = max_iter;
        const ScaResult r = sca_beamforming(h, cb, w0, power, o);
        return py::make_tuple(r.w, r.eta_history);
      },
      py::arg("h"), py::arg("codebook"), py::arg("w_init"), py::arg("power"), py::arg("tol") = 1e-4,
      py::arg("max_iter") = 30, "Returns (w, eta_history).");

  m.def(
      "optimize",
      [](const SystemConfig& cfg, const ChannelRealization& ch, const SolverOptions& opts, std::uint64_t seed,
         const std::function<void(int, double, double)>& on_iteration) {
        const Initialization init = initialize(cfg, opts.init, seed);
        IterationCallback cb;
        if (on_iteration) cb = [&](const IterationLog& l) { on_iteration(l.n, l.eta, l.wall_ms); };
        SolveResult r;
        if (cb) {
          r = optimize(cfg, ch, init, opts, cb);  // the callback needs the GIL
        } else {
          py::gil_scoped_release release;
          r = optimize(cfg, ch, init, opts);
        }
        SchemeResult s;
        s.scheme = "ma";
        s.w = r.w;
        s.layout = r.layout;
        s.d_min = r.d_min;
        s.solver_failure = r.record.termination == Termination::solver_failure;
        s.record = r.record;
        return scheme_dict(s);
      },
      py::arg("config"), py::arg("channel"), py::arg("options") = SolverOptions{}, py::arg("seed") = 0,
      py::arg("on_iteration") = nullptr);

  m.def(
      "run_scheme",
      [](const std::string& name, const SystemConfig& cfg, const ChannelRealization& ch, const SolverOptions& opts,
         std::uint64_t seed) {
        SchemeResult r;
        {
          py::gil_scoped_release release;
          r = run_scheme(name, cfg, ch, opts, seed);
        }
        return scheme_dict(r);
      },
      py::arg("scheme"), py::arg("config"), py::arg("channel"), py::arg("options") = SolverOptions{},
      py::arg("seed") = 0);

  m.def(
      "simulate_ber",
      [](const CMatrix& h, const CVector& w, const SmCodebook& cb, double snr_db, long long min_bits,
         long long max_bits, long long target_errors, double gain_reference, std::uint64_t seed) {
        BerOptions o;
        o.min_bits = min_bits;
        o.max_bits = max_bits;
        o.target_errors = target_errors;
        o.gain_reference = gain_reference;
        BerResult r;
        {
          py::gil_scoped_release release;
          r = simulate_ber(h, Precoder(w), cb, snr_db, o, seed);
        }
        py::dict d;
        d["ber"] = r.ber;
        d["ser"] = r.ser;
        d["bit_errors"] = r.bit_errors;
        d["total_bits"] = r.total_bits;
        d["symbol_errors"] = r.symbol_errors;
        d["trials"] = r.trials;
        return d;
      },
      py::arg("h"), py::arg("w"), py::arg("codebook"), py::arg("snr_db"), py::arg("min_bits") = 100000,
      py::arg("max_bits") = 1000000, py::arg("target_errors") = 100, py::arg("gain_reference") = 1.0,
      py::arg("seed") = 0);

  m.def("single_run_json", &single_run_json, py::arg("config"), py::arg("seed"));
}
