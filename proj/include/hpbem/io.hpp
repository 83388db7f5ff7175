#pragma once

#include "hpbem/estimator.hpp"

#include <string>
#include <vector>

namespace hpbem {

/// CSV rows of an adaptive run: fixed column schema, deterministic formatting.
std::string run_csv_header();
std::string run_csv_row(int step, const StepRecord& rec);

/// 200-point profile of (x1, u_n, u_t, lambda_n, lambda_t) along Gamma_C.
std::string solution_profile_csv(const DiscreteSolution& sol, const Mesh& mesh,
                                 const DiscreteSpaces& spaces, int n_samples = 200);

/// Binary matrix dump: <name>.bin (row-major float64) + <name>.json header.
void dump_matrix(const std::string& dir, const std::string& name, const Mat& M);

void write_text_file(const std::string& path, const std::string& content);

} // namespace hpbem
