#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "localdpm/experiment.hpp"

namespace localdpm {

/// shape,alpha,scheme,sigma,bc,N,h,err_max,order,cond2,condInf,cond_order,gamma_count,zeta_count
const std::string& csv_header();

/// Shortest round-trip decimal form ("nan" for NaN); independent of locale.
std::string format_double(double v);

void write_csv(std::ostream& out, const std::vector<SolveReport>& rows);
void write_csv_file(const std::string& path, const std::vector<SolveReport>& rows);
/// Inverse of write_csv for the CSV columns (timings and residual are left 0).
std::vector<SolveReport> read_csv(std::istream& in);

/// Rows, timings and fitted exponents as JSON.
void write_json_file(const std::string& path, const ResultTable& table,
                     const ExperimentConfig& config);

}  // namespace localdpm
