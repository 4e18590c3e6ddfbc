#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "nichecma/benchmark_suite.hpp"

namespace nichecma {

/// Problem dump, JSON text with every floating-point value written as a C99
/// hex-float string so a reload is bit-exact:
///
///   {
///     "format": "nichecma-problem", "version": 1,
///     "spec": {"problem_id", "group", "base_fn", "n_minima", "dim", "instance", "table_f_star"},
///     "seed": "0x<16 hex digits>",
///     "bias", "niche_radius", "sigma_w": hex floats,
///     "minima": [{"position": [dim hex floats],
///                 "hardness": hex float,
///                 "base_fn": name,
///                 "rotation": [dim*dim hex floats, row-major]}]
///   }
///
/// Keys are emitted in sorted order with two-space indentation and a trailing newline.
std::string dump_problem(const GeneratedProblem& problem);
GeneratedProblem load_problem(std::string_view text);

void write_problem(const GeneratedProblem& problem, const std::filesystem::path& path);
GeneratedProblem read_problem(const std::filesystem::path& path);

std::string to_hex_float(double v);
double from_hex_float(const std::string& s);

} // namespace nichecma
