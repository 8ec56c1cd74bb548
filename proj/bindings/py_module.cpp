#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "quphox/block_growth.hpp"
#include "quphox/solutions_io.hpp"
#include "quphox/version.hpp"

namespace py = pybind11;
using namespace quphox;

namespace {

PhotonicState parse_state_or_throw(const std::string& text) {
    auto state = PhotonicState::parse(text);
    if (!state) throw std::invalid_argument("cannot parse state: " + text);
    return *state;
}

CycNum parse_cyc_or_throw(const std::string& text) {
    auto value = CycNum::parse(text);
    if (!value) throw std::invalid_argument("cannot parse amplitude: " + text);
    return *value;
}

Objective parse_objective_or_throw(const std::string& text) {
    auto objective = parse_objective(text);
    if (!objective) throw std::invalid_argument("cannot parse objective: " + text);
    return *objective;
}

nlohmann::json result_to_json(const SearchConfig& config, const SearchResult& result) {
    nlohmann::json j;
    j["counters"] = {
        {"generated", result.counters.generated},
        {"rejected_mixing", result.counters.rejected_mixing},
        {"rejected_empty", result.counters.rejected_empty},
        {"rejected_cheap", result.counters.rejected_cheap},
        {"rejected_objective", result.counters.rejected_objective},
        {"solutions", result.counters.solutions},
    };
    nlohmann::json solutions = nlohmann::json::array();
    for (const Solution& solution : result.solutions) solutions.push_back(solution_to_json(solution));
    j["solutions"] = solutions;
    nlohmann::json registry = nlohmann::json::array();
    for (const Srv& srv : result.srv_registry) registry.push_back(srv.ranks);
    j["srv_registry"] = registry;
    j["objective"] = objective_to_string(config.objective);
    return j;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Symbolic design search for linear-optical quantum experiments";
    m.attr("__version__") = kVersion;

    py::class_<CycNum>(m, "CycNum",
                       "Exact amplitude in the 8th cyclotomic field, basis {1, z, z^2, z^3} "
                       "with z = exp(i*pi/4)")
        .def(py::init([](long long n) { return CycNum::from_int(n); }), py::arg("value"))
        .def_static("parse", &parse_cyc_or_throw)
        .def_static("phase", &CycNum::phase, py::arg("k"))
        .def_static("sqrt2", &CycNum::sqrt2)
        .def_static("inv_sqrt2", &CycNum::inv_sqrt2)
        .def_static("i", &CycNum::i)
        .def("__add__", [](const CycNum& a, const CycNum& b) { return a + b; })
        .def("__sub__", [](const CycNum& a, const CycNum& b) { return a - b; })
        .def("__mul__", [](const CycNum& a, const CycNum& b) { return a * b; })
        .def("__neg__", [](const CycNum& a) { return -a; })
        .def("__eq__", [](const CycNum& a, const CycNum& b) { return a == b; })
        .def("conj", &CycNum::conj)
        .def("inverse", &CycNum::inverse)
        .def("is_zero", &CycNum::is_zero)
        .def("is_real", &CycNum::is_real)
        .def("to_complex", &CycNum::to_complex)
        .def("__repr__", [](const CycNum& a) { return "CycNum(" + a.to_string() + ")"; })
        .def("__str__", &CycNum::to_string);

    py::class_<PhotonicState>(m, "PhotonicState",
                              "Unnormalized sparse multi-photon state over path/OAM modes")
        .def_static("parse", &parse_state_or_throw)
        .def_property_readonly("order", &PhotonicState::order)
        .def_property_readonly("term_count", &PhotonicState::term_count)
        .def("empty", &PhotonicState::empty)
        .def("terms",
             [](const PhotonicState& state) {
                 std::vector<std::pair<std::string, std::string>> out;
                 for (const auto& [term, amp] : state.terms()) {
                     out.emplace_back(term.to_string(), amp.to_string());
                 }
                 return out;
             })
        .def("srv", [](const PhotonicState& state) { return state.srv().ranks; })
        .def("fidelity", &PhotonicState::fidelity, py::arg("target"))
        .def("norm2", [](const PhotonicState& state) { return state.norm2().to_complex().real(); })
        .def("__str__", &PhotonicState::to_string)
        .def("__repr__", [](const PhotonicState& s) { return "PhotonicState(" + s.to_string() + ")"; });

    py::class_<Setup>(m, "Setup", "Two pair sources, an element chain and a heralding pattern")
        .def_static("parse", [](const std::string& text) { return parse_setup(text); })
        .def_property_readonly("element_count",
                               [](const Setup& s) { return s.elements.size(); })
        .def("to_text", [](const Setup& s) { return to_text(s); })
        .def("__str__", [](const Setup& s) { return to_text(s); });

    m.def("simulate", [](const Setup& setup) { return simulate(setup); },
          "Emission -> element chain -> postselect; the heralded state");
    m.def("mixes_pairs", &mixes_pairs, "Cheap topology criterion (no state built)");
    m.def("cheap_state_check", &cheap_state_check, py::arg("state"), py::arg("dims"),
          "Every photon slot carries at least `dims` distinct modes");
    m.def("ghz_match_json",
          [](const PhotonicState& state, int dims, bool allow_mavericks) -> py::object {
              auto cert = ghz_match(state, dims, allow_mavericks);
              if (!cert) return py::none();
              return py::str(certificate_to_json(Certificate{*cert}).dump());
          },
          py::arg("state"), py::arg("dims"), py::arg("allow_mavericks") = true);
    m.def("simplify_json",
          [](const Setup& setup, const std::string& objective_text) {
              Objective objective = parse_objective_or_throw(objective_text);
              auto satisfies = [&objective](const Setup& candidate) {
                  PhotonicState heralded;
                  if (!std::holds_alternative<GatePattern>(objective)) {
                      heralded = simulate(candidate);
                      if (heralded.empty()) return false;
                  }
                  SrvRegistry scratch;
                  return evaluate_objective(candidate, heralded, objective, scratch, nullptr)
                      .has_value();
              };
              return to_text(simplify(setup, satisfies));
          },
          py::arg("setup"), py::arg("objective"));

    m.def("run_search_json",
          [](const std::string& config_json) {
              SearchConfig config = config_from_json(nlohmann::json::parse(config_json));
              SearchResult result;
              {
                  py::gil_scoped_release release;
                  result = run_search(config);
              }
              return result_to_json(config, result).dump();
          },
          py::arg("config_json"));
    m.def("run_exhaustive_json",
          [](const std::string& config_json, int max_len) {
              SearchConfig config = config_from_json(nlohmann::json::parse(config_json));
              SearchResult result;
              {
                  py::gil_scoped_release release;
                  result = run_exhaustive(config, max_len);
              }
              return result_to_json(config, result).dump();
          },
          py::arg("config_json"), py::arg("max_len"));

    m.def("gate_match_table_json",
          [](std::vector<int> control_in, std::vector<int> target_in,
             std::vector<std::vector<int>> control_out,
             std::vector<std::vector<int>> target_out) -> py::object {
              GateTable table{std::move(control_in), std::move(target_in), std::move(control_out),
                              std::move(target_out)};
              auto cert = gate_match_table(table);
              if (!cert) return py::none();
              return py::str(certificate_to_json(Certificate{*cert}).dump());
          });

    m.def("block_signal",
          [](const std::array<double, 8>& angles) {
              Block block{angles};
              Matrix2c s = block_operator(block).signal();
              std::vector<std::vector<std::complex<double>>> out(2,
                                                                 std::vector<std::complex<double>>(2));
              for (int r = 0; r < 2; ++r) {
                  for (int c = 0; c < 2; ++c) out[static_cast<size_t>(r)][static_cast<size_t>(c)] = s(r, c);
              }
              return out;
          },
          py::arg("angles"), "Signal-space 2x2 operator of one block");

    m.def("grow_json",
          [](const std::vector<std::vector<std::complex<double>>>& target, double threshold,
             int max_blocks, std::uint64_t seed, int restarts, bool reoptimize_all) {
              if (target.size() != 2 || target[0].size() != 2 || target[1].size() != 2) {
                  throw std::invalid_argument("target must be 2x2");
              }
              Matrix2c t;
              for (int r = 0; r < 2; ++r) {
                  for (int c = 0; c < 2; ++c) {
                      t(r, c) = target[static_cast<size_t>(r)][static_cast<size_t>(c)];
                  }
              }
              GrowOptions options;
              options.seed = seed;
              options.restarts = restarts;
              options.reoptimize_all = reoptimize_all;
              GrowResult result;
              {
                  py::gil_scoped_release release;
                  result = grow_until(TargetOp::from_matrix(t), threshold, max_blocks, options);
              }
              nlohmann::json j;
              j["converged"] = result.converged;
              j["fidelity"] = result.fidelity;
              nlohmann::json blocks = nlohmann::json::array();
              for (const Block& block : result.blocks) {
                  blocks.push_back(std::vector<double>(block.angles.begin(), block.angles.end()));
              }
              j["blocks"] = blocks;
              j["trace"] = result.trace;
              return j.dump();
          },
          py::arg("target"), py::arg("threshold"), py::arg("max_blocks") = 5, py::arg("seed") = 1,
          py::arg("restarts") = 5, py::arg("reoptimize_all") = true);
}
