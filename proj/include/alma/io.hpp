#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "alma/alma.hpp"
#include "alma/operators.hpp"

namespace alma {

/// |x| as a 16-bit binary PGM, linearly scaled so ref_max maps to 65535
/// (values above ref_max saturate).
void write_pgm16(const std::filesystem::path& path, const RealImage& img, double ref_max);
void write_pgm16(const std::filesystem::path& path, const ComplexImage& img, double ref_max);
void write_pgm16(const std::filesystem::path& path, const BoolImage& mask);

/// Acquired line indices, one per line of text, 1-based.
void write_mask_text(const std::filesystem::path& path, const SamplingMask& mask);
SamplingMask read_mask_text(const std::filesystem::path& path, int n_lines);

/// Raw little-endian float64 interleaved re/im in [coil][line][col] order,
/// with a JSON sidecar (same stem, .json) recording shape, mask and seed.
void write_kspace(const std::filesystem::path& path, const MultiCoilKSpace& y,
                  std::uint64_t seed, double eta);
MultiCoilKSpace read_kspace(const std::filesystem::path& path);

void write_trace_csv(const std::filesystem::path& path, const AlmaTrace& trace);

/// Deterministic shortest round-trip formatting for CSV cells.
std::string format_double(double v);

std::string csv_row(const std::vector<std::string>& cells);

}  // namespace alma
