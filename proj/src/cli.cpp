#include "nichecma/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "nichecma/error.hpp"
#include "nichecma/harness.hpp"
#include "nichecma/problem_io.hpp"
#include "nichecma/report.hpp"

namespace nichecma {

namespace {

constexpr int kUsageError = 2;
constexpr const char* kSeedEnv = "NICHECMA_SEED";

std::uint64_t resolve_seed(std::uint64_t flag_value)
{
    if (const char* env = std::getenv(kSeedEnv); env && *env)
    {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 0);
        if (*end != '\0')
            throw Error(ErrorKind::invalid_argument, std::string(kSeedEnv) + " is not an integer: " + env);
        return v;
    }
    return flag_value;
}

void print_record(std::ostream& out, const RunRecord& r)
{
    out << "problem=" << r.spec.problem_id << " group=" << to_char(r.spec.group) << " dim=" << r.spec.dim
        << " instance=" << r.spec.instance << " f_star=" << r.f_star << " f_best=" << r.f_best
        << " epsilon_f=" << r.metrics.epsilon_f << " precision=" << r.metrics.precision
        << " recall=" << r.metrics.recall << " f1=" << r.metrics.f1 << " restarts=" << r.restarts
        << " evals=" << r.metrics.evals_used << "\n";
}

} // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Niching CMA-ES on tunable composite multimodal benchmarks", "nichecma"};
    app.require_subcommand(1);

    RunConfig defaults;

    // run
    auto* run = app.add_subcommand("run", "Optimize one problem instance");
    int run_problem = 1;
    std::size_t run_dim = 2;
    std::size_t run_instance = 1;
    std::uint64_t run_seed = defaults.master_seed;
    std::size_t run_budget = defaults.budget_multiplier;
    double run_sigma0 = defaults.sigma0;
    std::optional<std::size_t> run_lambda;
    std::string run_out;
    std::string run_trace;
    run->add_option("--problem", run_problem, "Problem id 1..16")->check(CLI::Range(1, 16));
    run->add_option("--dim", run_dim, "Dimension")->check(CLI::PositiveNumber);
    run->add_option("--instance", run_instance, "Instance number")->check(CLI::PositiveNumber);
    run->add_option("--seed", run_seed, "Master seed (NICHECMA_SEED overrides)");
    run->add_option("--budget-multiplier", run_budget, "Evaluations per dimension")->check(CLI::PositiveNumber);
    run->add_option("--sigma0", run_sigma0, "Initial step size")->check(CLI::PositiveNumber);
    run->add_option("--lambda", run_lambda, "Population size override");
    run->add_option("--out", run_out, "Write the record as CSV to this path");
    run->add_option("--trace", run_trace, "Write the convergence trace (TSV) to this path");

    // suite
    auto* suite = app.add_subcommand("suite", "Run the problems x dims x instances matrix");
    std::vector<std::size_t> suite_dims = defaults.dims;
    std::size_t suite_instances = defaults.instances;
    std::vector<int> suite_problems = defaults.problems;
    std::uint64_t suite_seed = defaults.master_seed;
    std::size_t suite_budget = defaults.budget_multiplier;
    std::string suite_out_dir = ".";
    std::size_t suite_jobs = 1;
    bool suite_traces = false;
    suite->add_option("--dims", suite_dims, "Comma-separated dimensions")->delimiter(',');
    suite->add_option("--instances", suite_instances, "Instances per problem and dimension")
        ->check(CLI::PositiveNumber);
    suite->add_option("--problems", suite_problems, "Comma-separated problem ids")
        ->delimiter(',')
        ->check(CLI::Range(1, 16));
    suite->add_option("--seed", suite_seed, "Master seed (NICHECMA_SEED overrides)");
    suite->add_option("--budget-multiplier", suite_budget, "Evaluations per dimension")->check(CLI::PositiveNumber);
    suite->add_option("--out-dir", suite_out_dir, "Directory for results.csv and traces");
    suite->add_option("--jobs", suite_jobs, "Concurrent runs")->check(CLI::PositiveNumber);
    suite->add_flag("--traces", suite_traces, "Also write one trace file per run under <out-dir>/traces");

    // gen
    auto* gen = app.add_subcommand("gen", "Dump a generated problem instance");
    int gen_problem = 1;
    std::size_t gen_dim = 2;
    std::size_t gen_instance = 1;
    std::uint64_t gen_seed = defaults.master_seed;
    std::string gen_out;
    gen->add_option("--problem", gen_problem, "Problem id 1..16")->check(CLI::Range(1, 16));
    gen->add_option("--dim", gen_dim, "Dimension")->check(CLI::PositiveNumber);
    gen->add_option("--instance", gen_instance, "Instance number")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "Master seed (NICHECMA_SEED overrides)");
    gen->add_option("--out", gen_out, "Output path (stdout when omitted)");

    // report
    auto* report = app.add_subcommand("report", "Aggregate a results CSV");
    std::string report_in;
    std::string report_out;
    report->add_option("csv", report_in, "Results CSV")->required();
    report->add_option("--out", report_out, "Write the report here instead of stdout");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e, out, err);
    }
    catch (const CLI::CallForAllHelp& e)
    {
        return app.exit(e, out, err);
    }
    catch (const CLI::ParseError& e)
    {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsageError;
    }

    try
    {
        if (*run)
        {
            RunConfig config;
            config.master_seed = resolve_seed(run_seed);
            config.budget_multiplier = run_budget;
            config.sigma0 = run_sigma0;
            config.lambda_override = run_lambda;
            const auto spec = ProblemSpec::make(run_problem, run_dim, run_instance);
            auto record = run_single(spec, config);
            if (!run_trace.empty())
            {
                emit_trace(record.trace, run_trace);
                record.trace_path = run_trace;
            }
            if (!run_out.empty())
                emit_csv(std::span<const RunRecord>(&record, 1), run_out);
            print_record(out, record);
        }
        else if (*suite)
        {
            RunConfig config;
            config.master_seed = resolve_seed(suite_seed);
            config.budget_multiplier = suite_budget;
            config.dims = suite_dims;
            config.instances = suite_instances;
            config.problems = suite_problems;
            const std::filesystem::path dir(suite_out_dir);
            std::filesystem::create_directories(dir);
            if (suite_traces)
            {
                config.trace_dir = dir / "traces";
                std::filesystem::create_directories(*config.trace_dir);
            }
            const auto records = run_suite(config, suite_jobs, [&](const RunRecord& r, std::size_t done, std::size_t total) {
                err << "[" << done << "/" << total << "] ";
                if (r.error)
                    err << "problem=" << r.spec.problem_id << " dim=" << r.spec.dim << " instance=" << r.spec.instance
                        << " error: " << *r.error << "\n";
                else
                    print_record(err, r);
            });
            const auto csv = dir / "results.csv";
            emit_csv(records, csv);
            out << "wrote " << records.size() << " records to " << csv.string() << "\n";
        }
        else if (*gen)
        {
            const auto spec = ProblemSpec::make(gen_problem, gen_dim, gen_instance);
            const auto problem = instantiate_problem(spec, resolve_seed(gen_seed));
            if (gen_out.empty())
                out << dump_problem(problem);
            else
                write_problem(problem, gen_out);
        }
        else if (*report)
        {
            const auto text = format_report(summarize(read_csv(report_in)));
            if (report_out.empty())
                out << text;
            else
            {
                std::ofstream f(report_out, std::ios::binary);
                if (!(f << text))
                    throw Error(ErrorKind::io, "cannot write " + report_out);
            }
        }
    }
    catch (const Error& e)
    {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return 1;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace nichecma
