#include "nichecma/problem_io.hpp"

#include <cerrno>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "nichecma/error.hpp"

namespace nichecma {

using json = nlohmann::json;

namespace {

constexpr std::string_view kFormat = "nichecma-problem";
constexpr int kVersion = 1;

template <typename T>
T field(const json& j, const char* key)
{
    if (!j.contains(key))
        throw Error(ErrorKind::parse, std::string("problem dump is missing '") + key + "'");
    try
    {
        return j.at(key).get<T>();
    }
    catch (const json::exception& e)
    {
        throw Error(ErrorKind::parse, std::string("bad value for '") + key + "': " + e.what());
    }
}

double hex_field(const json& j, const char* key)
{
    return from_hex_float(field<std::string>(j, key));
}

} // namespace

std::string to_hex_float(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double from_hex_float(const std::string& s)
{
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE)
        throw Error(ErrorKind::parse, "not a floating-point literal: '" + s + "'");
    return v;
}

std::string dump_problem(const GeneratedProblem& problem)
{
    const auto& spec = problem.spec;
    const auto& niche = problem.niche;

    json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["spec"] = {
        {"problem_id", spec.problem_id},
        {"group", std::string(1, to_char(spec.group))},
        {"base_fn", std::string(to_string(spec.base_fn))},
        {"n_minima", spec.n_minima},
        {"dim", spec.dim},
        {"instance", spec.instance},
        {"table_f_star", to_hex_float(spec.table_f_star)},
    };
    char seed[32];
    std::snprintf(seed, sizeof seed, "0x%016" PRIx64, problem.seed);
    j["seed"] = seed;
    j["bias"] = to_hex_float(problem.bias);
    j["niche_radius"] = to_hex_float(niche.niche_radius);
    j["sigma_w"] = to_hex_float(niche.sigma_w);

    json minima = json::array();
    for (std::size_t i = 0; i < niche.size(); ++i)
    {
        json position = json::array();
        for (double v : niche.positions[i])
            position.push_back(to_hex_float(v));
        json rotation = json::array();
        const auto& r = niche.rotations[i];
        for (Eigen::Index row = 0; row < r.rows(); ++row)
            for (Eigen::Index col = 0; col < r.cols(); ++col)
                rotation.push_back(to_hex_float(r(row, col)));
        minima.push_back({
            {"position", std::move(position)},
            {"hardness", to_hex_float(niche.hardness[i])},
            {"base_fn", std::string(to_string(niche.base_fns[i]))},
            {"rotation", std::move(rotation)},
        });
    }
    j["minima"] = std::move(minima);
    return j.dump(2) + "\n";
}

GeneratedProblem load_problem(std::string_view text)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw Error(ErrorKind::parse, std::string("problem dump is not valid JSON: ") + e.what());
    }
    if (field<std::string>(j, "format") != kFormat)
        throw Error(ErrorKind::parse, "not a nichecma problem dump");
    if (field<int>(j, "version") != kVersion)
        throw Error(ErrorKind::parse, "unsupported problem dump version");

    GeneratedProblem out;
    const json& s = j.at("spec");
    auto& spec = out.spec;
    spec.problem_id = field<int>(s, "problem_id");
    const auto group = field<std::string>(s, "group");
    if (group != "A" && group != "B")
        throw Error(ErrorKind::parse, "group must be A or B");
    spec.group = group == "A" ? Group::A : Group::B;
    const auto fn = parse_base_function(field<std::string>(s, "base_fn"));
    if (!fn)
        throw Error(ErrorKind::unknown_function, "unknown base function in problem dump");
    spec.base_fn = *fn;
    spec.n_minima = field<std::size_t>(s, "n_minima");
    spec.dim = field<std::size_t>(s, "dim");
    spec.instance = field<std::size_t>(s, "instance");
    spec.table_f_star = hex_field(s, "table_f_star");

    out.seed = std::stoull(field<std::string>(j, "seed"), nullptr, 16);
    out.bias = hex_field(j, "bias");

    auto& niche = out.niche;
    niche.bias = out.bias;
    niche.niche_radius = hex_field(j, "niche_radius");
    niche.sigma_w = hex_field(j, "sigma_w");

    const auto n = static_cast<Eigen::Index>(spec.dim);
    for (const auto& m : j.at("minima"))
    {
        const auto& pos = m.at("position");
        const auto& rot = m.at("rotation");
        if (static_cast<Eigen::Index>(pos.size()) != n || static_cast<Eigen::Index>(rot.size()) != n * n)
            throw Error(ErrorKind::parse, "minimum has the wrong dimension");
        Vector p(n);
        for (Eigen::Index i = 0; i < n; ++i)
            p[i] = from_hex_float(pos[static_cast<std::size_t>(i)].get<std::string>());
        Matrix r(n, n);
        for (Eigen::Index row = 0; row < n; ++row)
            for (Eigen::Index col = 0; col < n; ++col)
                r(row, col) = from_hex_float(rot[static_cast<std::size_t>(row * n + col)].get<std::string>());
        const auto base = parse_base_function(field<std::string>(m, "base_fn"));
        if (!base)
            throw Error(ErrorKind::unknown_function, "unknown base function in problem dump");

        niche.positions.push_back(std::move(p));
        niche.rotations.push_back(std::move(r));
        niche.hardness.push_back(hex_field(m, "hardness"));
        niche.base_fns.push_back(*base);
    }
    if (niche.size() != spec.n_minima)
        throw Error(ErrorKind::parse, "minima count does not match spec.n_minima");
    return out;
}

void write_problem(const GeneratedProblem& problem, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
    out << dump_problem(problem);
    if (!out)
        throw Error(ErrorKind::io, "failed writing " + path.string());
}

GeneratedProblem read_problem(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_problem(buf.str());
}

} // namespace nichecma
