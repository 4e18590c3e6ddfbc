#include <deque>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nichecma/benchmark_suite.hpp"
#include "nichecma/cma_core.hpp"
#include "nichecma/error.hpp"
#include "nichecma/harness.hpp"
#include "nichecma/metrics.hpp"
#include "nichecma/niche_fitness.hpp"
#include "nichecma/problem_io.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace nichecma;

namespace {

// One CMA-ES restart with its own stream and best-so-far history.
class Strategy
{
public:
    Strategy(Vector mean, double sigma, std::uint64_t seed, std::optional<std::size_t> lambda, double lower,
             double upper)
        : params_(derive_params(static_cast<std::size_t>(mean.size()), lambda)),
          state_(CmaState::initial(std::move(mean), sigma)), rng_(seed), bounds_{lower, upper}
    {
        if (!(sigma > 0.0))
            throw Error(ErrorKind::invalid_argument, "sigma must be positive");
    }

    py::tuple step(const std::function<double(const Vector&)>& f)
    {
        const auto r = nichecma::step(state_, params_, f, rng_, bounds_);
        best_ = std::min(best_, r.best().fitness);
        history_.push_back(best_);
        const std::size_t keep = 50 * params_.n + 1;
        if (history_.size() > keep)
            history_.pop_front();
        return py::make_tuple(r.best().x, r.best().fitness, r.evals_used);
    }

    std::optional<std::string> stop_reason() const
    {
        if (const auto s = check_termination(state_, history_))
            return std::string(to_string(*s));
        return std::nullopt;
    }

    const CmaParams& params() const { return params_; }
    const CmaState& state() const { return state_; }

private:
    CmaParams params_;
    CmaState state_;
    Rng rng_;
    Bounds bounds_;
    std::deque<double> history_;
    double best_ = std::numeric_limits<double>::infinity();
};

Matrix stack(const std::vector<Vector>& rows)
{
    if (rows.empty())
        return Matrix(0, 0);
    Matrix m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return m;
}

std::vector<Vector> unstack(const Matrix& m)
{
    std::vector<Vector> rows;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        rows.emplace_back(m.row(i).transpose());
    return rows;
}

py::dict record_dict(const RunRecord& r)
{
    py::list trace;
    for (const auto& t : r.trace)
        trace.append(py::make_tuple(t.generation, t.evals, t.best_f, t.sigma, t.restart_index));
    std::vector<Vector> reported;
    for (const auto& e : r.reported)
        reported.push_back(e.x);
    return py::dict("problem_id"_a = r.spec.problem_id, "group"_a = std::string(1, to_char(r.spec.group)),
                    "dim"_a = r.spec.dim, "instance"_a = r.spec.instance, "f_star"_a = r.f_star, "f_best"_a = r.f_best,
                    "epsilon_f"_a = r.metrics.epsilon_f, "precision"_a = r.metrics.precision,
                    "recall"_a = r.metrics.recall, "f1"_a = r.metrics.f1, "evals_used"_a = r.metrics.evals_used,
                    "n_true"_a = r.n_true, "n_reported"_a = r.n_reported, "n_matched"_a = r.n_matched,
                    "restarts"_a = r.restarts, "wall_ms"_a = r.wall_ms, "reported"_a = stack(reported),
                    "trace"_a = trace, "error"_a = r.error);
}

RunConfig make_config(std::uint64_t seed, std::size_t budget_multiplier, std::optional<std::size_t> lambda)
{
    RunConfig c;
    c.master_seed = seed;
    c.budget_multiplier = budget_multiplier;
    c.lambda_override = lambda;
    return c;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Niching CMA-ES and composite multimodal benchmarks";

    py::register_exception<Error>(m, "Error", PyExc_ValueError);

    // strategy
    py::class_<CmaParams>(m, "CmaParams")
        .def_readonly("n", &CmaParams::n)
        .def_readonly("lambda_", &CmaParams::lambda)
        .def_readonly("mu", &CmaParams::mu)
        .def_readonly("weights", &CmaParams::weights)
        .def_readonly("mu_eff", &CmaParams::mu_eff)
        .def_readonly("c_c", &CmaParams::c_c)
        .def_readonly("c_sigma", &CmaParams::c_sigma)
        .def_readonly("d_sigma", &CmaParams::d_sigma)
        .def_readonly("c_1", &CmaParams::c_1)
        .def_readonly("c_mu", &CmaParams::c_mu)
        .def_readonly("expected_norm", &CmaParams::expected_norm);

    m.def("derive_params", &derive_params, "n"_a, "lambda_"_a = py::none());
    m.def("expected_norm", &expected_norm, "n"_a);

    py::class_<Strategy>(m, "Strategy")
        .def(py::init<Vector, double, std::uint64_t, std::optional<std::size_t>, double, double>(), "mean"_a,
             "sigma"_a, "seed"_a = 0, "lambda_"_a = py::none(), "lower"_a = -5.0, "upper"_a = 5.0)
        .def("step", &Strategy::step, "objective"_a,
             "One generation. Returns (best_x, best_f, evals) of that generation.")
        .def("stop_reason", &Strategy::stop_reason)
        .def_property_readonly("params", &Strategy::params)
        .def_property_readonly("mean", [](const Strategy& s) { return s.state().mean; })
        .def_property_readonly("sigma", [](const Strategy& s) { return s.state().sigma; })
        .def_property_readonly("cov", [](const Strategy& s) { return s.state().cov; })
        .def_property_readonly("generation", [](const Strategy& s) { return s.state().generation; });

    // landscapes
    m.def("base_eval", py::overload_cast<int, const Vector&>(&base_eval), "fn_id"_a, "z"_a);
    m.def("niching_radius", [](const Matrix& pts) { return niching_radius(unstack(pts)); }, "positions"_a);
    m.def("hardness", &hardness, "index"_a, "n_minima"_a, "min_h"_a, "max_h"_a);

    py::class_<GeneratedProblem>(m, "Problem")
        .def(py::init([](int problem_id, std::size_t dim, std::size_t instance, std::uint64_t seed) {
                 return instantiate_problem(ProblemSpec::make(problem_id, dim, instance), seed);
             }),
             "problem_id"_a, "dim"_a, "instance"_a = 1, "seed"_a = kDefaultMasterSeed)
        .def("__call__", [](const GeneratedProblem& p, const Vector& x) {
            if (static_cast<std::size_t>(x.size()) != p.spec.dim)
                throw Error(ErrorKind::invalid_dimension, "point has the wrong dimension");
            return p(x);
        })
        .def("weights", [](const GeneratedProblem& p, const Vector& x) { return niche_weights(x, p.niche); })
        .def_property_readonly("minima", [](const GeneratedProblem& p) { return stack(p.niche.positions); })
        .def_property_readonly("hardness", [](const GeneratedProblem& p) { return p.niche.hardness; })
        .def_property_readonly("rotations", [](const GeneratedProblem& p) { return p.niche.rotations; })
        .def_property_readonly("niche_radius", [](const GeneratedProblem& p) { return p.niche.niche_radius; })
        .def_readonly("bias", &GeneratedProblem::bias)
        .def_readonly("seed", &GeneratedProblem::seed)
        .def_property_readonly("dim", [](const GeneratedProblem& p) { return p.spec.dim; })
        .def_property_readonly("base_function",
                               [](const GeneratedProblem& p) { return std::string(to_string(p.spec.base_fn)); })
        .def("dump", &dump_problem)
        .def_static("load", [](const std::string& text) { return load_problem(text); }, "text"_a);

    // metrics
    m.def("epsilon_f", &epsilon_f, "f_best"_a, "f_star"_a);
    m.def("f1_score", &f1_score, "precision"_a, "recall"_a);
    m.def(
        "match_peaks",
        [](const Matrix& xs, const std::vector<double>& fs, const Matrix& minima, double bias, double radius,
           double f_tol) {
            if (static_cast<std::size_t>(xs.rows()) != fs.size())
                throw Error(ErrorKind::invalid_argument, "one fitness per reported point");
            std::vector<ReportedSolution> rep;
            for (Eigen::Index i = 0; i < xs.rows(); ++i)
                rep.push_back({xs.row(i).transpose(), fs[static_cast<std::size_t>(i)]});
            const auto truth = unstack(minima);
            const auto d = match_peaks(rep, truth, bias, radius, f_tol);
            const auto pr = precision_recall(d);
            py::list pairs;
            for (const auto& mt : d.matched)
                pairs.append(py::make_tuple(mt.minimum, mt.reported, mt.distance));
            return py::dict("matched"_a = pairs, "precision"_a = pr.precision, "recall"_a = pr.recall,
                            "f1"_a = f1_score(pr.precision, pr.recall));
        },
        "reported_x"_a, "reported_f"_a, "minima"_a, "bias"_a, "radius"_a, "f_tol"_a);
    m.def(
        "overall_score",
        [](const std::vector<std::pair<double, double>>& eps_f1) {
            std::vector<RunMetrics> runs;
            for (const auto& [e, f] : eps_f1)
                runs.push_back({e, 0.0, 0.0, f, 0});
            return overall_score(runs);
        },
        "runs"_a, "List of (epsilon_f, f1) pairs.");

    // harness
    m.def(
        "run",
        [](int problem_id, std::size_t dim, std::size_t instance, std::uint64_t seed, std::size_t budget_multiplier,
           std::optional<std::size_t> lambda) {
            const auto cfg = make_config(seed, budget_multiplier, lambda);
            RunRecord r;
            {
                py::gil_scoped_release release;
                r = run_single(ProblemSpec::make(problem_id, dim, instance), cfg);
            }
            return record_dict(r);
        },
        "problem_id"_a, "dim"_a, "instance"_a = 1, "seed"_a = kDefaultMasterSeed, "budget_multiplier"_a = 50000,
        "lambda_"_a = py::none());
    m.def(
        "suite",
        [](std::vector<int> problems, std::vector<std::size_t> dims, std::size_t instances, std::uint64_t seed,
           std::size_t budget_multiplier, std::size_t jobs) {
            auto cfg = make_config(seed, budget_multiplier, std::nullopt);
            cfg.problems = std::move(problems);
            cfg.dims = std::move(dims);
            cfg.instances = instances;
            std::vector<RunRecord> recs;
            {
                py::gil_scoped_release release;
                recs = run_suite(cfg, jobs);
            }
            py::list out;
            for (const auto& r : recs)
                out.append(record_dict(r));
            return py::make_tuple(out, csv_text(recs));
        },
        "problems"_a, "dims"_a, "instances"_a = 1, "seed"_a = kDefaultMasterSeed, "budget_multiplier"_a = 50000,
        "jobs"_a = 1, "Returns (records, csv_text).");
}
