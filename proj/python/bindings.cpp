// Python bindings; JSON strings are decoded on the Python side.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rcprob/run.h"

namespace py = pybind11;
using namespace rcprob;

namespace {

Diagnostic from_error(const Error& e) {
    Diagnostic d;
    d.code = e.code();
    d.message = e.message();
    d.line = e.pos().line;
    d.col = e.pos().col;
    return d;
}

std::vector<std::string> validate_texts(const std::string& model_text, const std::string& spec_text) {
    std::vector<std::string> out;
    try {
        ModelAst m = parse_model(model_text);
        SpecAst s = parse_spec(spec_text);
        for (const auto& d : validate(m, s)) out.push_back(to_json_line(d));
    } catch (const Error& e) {
        out.push_back(to_json_line(from_error(e)));
    }
    return out;
}

py::tuple run_check(const std::string& model, const std::string& spec, const std::string& engine,
                    const std::string& kind, const std::string& prop, const std::string& out_dir, std::uint64_t seed,
                    std::size_t max_states, std::optional<double> tol, unsigned threads, bool timings) {
    RunPlan plan;
    plan.model_path = model;
    plan.spec_path = spec;
    if (engine == "smc") plan.engine = Engine::Smc;
    else if (engine == "emit") plan.engine = Engine::Emit;
    else if (engine != "internal") throw py::value_error("engine must be internal, smc or emit");
    if (kind == "dtmc") plan.kind = ModelKind::Dtmc;
    else if (kind == "mdp") plan.kind = ModelKind::Mdp;
    else if (!kind.empty()) throw py::value_error("kind must be dtmc or mdp");
    plan.prop_glob = prop;
    plan.out_dir = out_dir;
    plan.seed = seed;
    plan.max_states = max_states;
    plan.tol = tol;
    plan.threads = threads;
    plan.timings = timings;

    RunOutcome o;
    {
        py::gil_scoped_release release;
        o = run(plan);
    }
    std::vector<std::string> diags, records;
    for (const auto& d : o.diagnostics) diags.push_back(to_json_line(d));
    for (const auto& r : o.records) records.push_back(record_json(r, timings));
    return py::make_tuple(o.exit_code, diags, records, o.files);
}

}  // namespace

PYBIND11_MODULE(_rcprob, m) {
    m.doc() = "Probabilistic checking of RoboChart models against RoboCertProb properties";
    static PyObject* error_type = PyErr_NewException("rcprob._rcprob.RcprobError", PyExc_RuntimeError, nullptr);
    m.attr("RcprobError") = py::reinterpret_borrow<py::object>(error_type);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(error_type, (e.code() + ": " + e.what()).c_str());
        }
    });

    m.def("validate_texts", &validate_texts, py::arg("model_text"), py::arg("spec_text"));
    m.def("run_check", &run_check, py::arg("model"), py::arg("spec"), py::arg("engine") = "internal",
          py::arg("kind") = "", py::arg("prop") = "*", py::arg("out_dir") = ".", py::arg("seed") = 0,
          py::arg("max_states") = 10'000'000, py::arg("tol") = py::none(), py::arg("threads") = 0,
          py::arg("timings") = true);
    m.def("format_spec", [](const std::string& text) { return print_spec(parse_spec(text)); }, py::arg("text"));
    m.def("format_model", [](const std::string& text) { return print_model(parse_model(text)); }, py::arg("text"));
    m.def("apmc_samples", &apmc_samples, py::arg("epsilon"), py::arg("delta"));
}
