#pragma once

#include <iosfwd>
#include <string>

#include "alphalab/dynamics.hpp"
#include "alphalab/panel.hpp"

namespace alphalab {

// Reads the panel CSV `t,y,x1..xm,z1..zp` (decimal dot, rows sorted by
// t). m and p are inferred from the header. Non-numeric cells raise an
// error naming the row and column; an off-grid time column is reindexed
// onto a dyadic grid and flagged rather than rejected.
ReturnsPanel ingest_csv(const std::string& path);
ReturnsPanel ingest_csv_stream(std::istream& in, const std::string& path_label);

// One row per path, comma separated.
void write_paths_csv(const PathEnsemble& ensemble, std::ostream& out);
void write_paths_csv_file(const PathEnsemble& ensemble, const std::string& path);

// Compact binary layout, little-endian:
//   bytes 0..7   magic "ALPHPATH"
//   u32 version (1), u32 level
//   u64 trials, u64 seed
//   u32 scheme id, u32 flags (bit 0: pinned final step)
//   f64 initial value
//   trials x (2^level + 1) float64 path values, row-major.
void write_paths_binary(const PathEnsemble& ensemble, const std::string& path);
PathEnsemble read_paths_binary(const std::string& path);

std::uint32_t scheme_id(const std::string& scheme);
std::string scheme_from_id(std::uint32_t id);

void write_excursions_csv(const ExcursionEnsemble& ensemble, std::ostream& out);

} // namespace alphalab
