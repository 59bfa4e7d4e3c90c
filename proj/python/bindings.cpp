#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <sstream>

#include "zetasum/expr.hpp"
#include "zetasum/phg.hpp"
#include "zetasum/run.hpp"
#include "zetasum/sturm.hpp"

namespace py = pybind11;
using namespace zetasum;

namespace {

// Everything numerical takes expressions rather than Python callables: the
// kernels evaluate from worker threads that do not hold the GIL.
RealFunction expr_fn(const std::string& text) {
  const Expression e = parse_expression(text);
  return RealFunction([e](double x) { return e(x); });
}

SLOperator make_op(const std::string& V, const std::string& W, double lambda,
                   const std::string& bc0, const std::string& bc1) {
  SLOperator op;
  op.V = expr_fn(V);
  op.W = expr_fn(W);
  op.lambda = lambda;
  op.bc0 = parse_boundary(bc0);
  op.bc1 = parse_boundary(bc1);
  op.validate();
  return op;
}

KernelKind kernel_kind(const std::string& k) {
  if (k == "theta") return KernelKind::K_theta;
  if (k == "R") return KernelKind::K_R;
  if (k == "plus") return KernelKind::K_plus;
  if (k == "R_power") return KernelKind::K_R_power;
  throw DomainError("kernel kind must be theta, R, plus or R_power");
}

}  // namespace

PYBIND11_MODULE(_zetasum, m) {
  m.doc() = "Zeta-regularized determinants of Sturm-Liouville direct sums";
  m.attr("__version__") = ZETASUM_VERSION;

  static py::exception<NumericalError> numerical(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NumericalError& e) {
      py::set_error(numerical, e.what());
    } catch (const DomainError& e) {
      py::set_error(PyExc_ValueError, e.what());
    }
  });

  py::class_<Expression>(m, "Expression")
      .def(py::init([](const std::string& text) { return parse_expression(text); }))
      .def("__call__", &Expression::operator())
      .def("derivative", &Expression::derivative)
      .def("__str__", &Expression::to_string)
      .def("__repr__", [](const Expression& e) { return "Expression(" + e.to_string() + ")"; });

  m.def(
      "logdet",
      [](const std::string& V, const std::string& W, double lambda, const std::string& bc0,
         const std::string& bc1, const std::string& method) {
        const LogDetMethod lm = method == "gy"   ? LogDetMethod::gelfand_yaglom
                                : method == "pf" ? LogDetMethod::resolvent_pf
                                : method == "zeta"
                                    ? LogDetMethod::resolvent_zeta
                                    : throw DomainError("method must be gy, pf or zeta");
        auto op = make_op(V, W, lambda, bc0, bc1);
        py::gil_scoped_release release;
        return logdet(op, lm).value;
      },
      py::arg("V"), py::arg("W") = "0", py::arg("lam") = 0.0, py::arg("bc0") = "dirichlet",
      py::arg("bc1") = "dirichlet", py::arg("method") = "gy");

  m.def(
      "eigenvalues",
      [](const std::string& V, const std::string& W, double lambda, int count,
         const std::string& bc0, const std::string& bc1) {
        auto op = make_op(V, W, lambda, bc0, bc1);
        py::gil_scoped_release release;
        return eigenvalues(op, count).eigenvalues;
      },
      py::arg("V"), py::arg("W") = "0", py::arg("lam") = 0.0, py::arg("count") = 5,
      py::arg("bc0") = "dirichlet", py::arg("bc1") = "dirichlet");

  m.def(
      "resolvent_trace",
      [](const std::string& V, const std::string& W, double lambda, double z, int power,
         int d_lambda, int d_z, const std::string& bc0, const std::string& bc1) {
        auto op = make_op(V, W, lambda, bc0, bc1);
        py::gil_scoped_release release;
        return resolvent_trace(op, z, power, d_lambda, d_z);
      },
      py::arg("V"), py::arg("W") = "0", py::arg("lam") = 0.0, py::arg("z") = 1.0,
      py::arg("power") = 1, py::arg("d_lambda") = 0, py::arg("d_z") = 0,
      py::arg("bc0") = "dirichlet", py::arg("bc1") = "dirichlet");

  m.def(
      "kernel",
      [](const std::string& kind, double mu, double theta, int j, double x, double y) {
        return kernel_eval(kernel_kind(kind), {mu, theta, j, x, y});
      },
      py::arg("kind"), py::arg("mu"), py::arg("theta") = 0.0, py::arg("j") = 1,
      py::arg("x") = 0.0, py::arg("y") = 0.0);

  m.def(
      "interior_h0",
      [](const std::string& V, double lambda, double z) {
        return interior_h0(expr_fn(V), expr_fn("0"), lambda, z);
      },
      py::arg("V"), py::arg("lam"), py::arg("z"));

  m.def(
      "run",
      [](const std::string& config_json) {
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(config_json);
        } catch (const nlohmann::json::exception& e) {
          throw DomainError(std::string("config is not valid JSON: ") + e.what());
        }
        RunConfig c = config_from_json(j);
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run(c, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("config_json"),
      "Runs one command from a JSON config; returns (exit_code, stdout, stderr).");
}
