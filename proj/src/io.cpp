#include "alma/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace alma {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, mode);
  if (!f) throw config_error("cannot open for writing: " + path.string());
  return f;
}

void write_pgm16_raw(const std::filesystem::path& path, const RealImage& img, double ref_max) {
  std::ofstream f = open_out(path, std::ios::binary);
  f << "P5\n" << img.cols() << " " << img.rows() << "\n65535\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(img.cols()) * 2);
  for (int i = 0; i < img.rows(); ++i) {
    for (int j = 0; j < img.cols(); ++j) {
      double v = ref_max > 0.0 ? img(i, j) / ref_max : 0.0;
      int q = static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
      row[2 * j] = static_cast<unsigned char>(q >> 8);  // PGM stores big-endian
      row[2 * j + 1] = static_cast<unsigned char>(q & 0xff);
    }
    f.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
}

}  // namespace

void write_pgm16(const std::filesystem::path& path, const RealImage& img, double ref_max) {
  write_pgm16_raw(path, img, ref_max);
}

void write_pgm16(const std::filesystem::path& path, const ComplexImage& img, double ref_max) {
  write_pgm16_raw(path, magnitude(img), ref_max);
}

void write_pgm16(const std::filesystem::path& path, const BoolImage& mask) {
  RealImage img(mask.rows(), mask.cols());
  for (std::size_t i = 0; i < mask.size(); ++i) img.data()[i] = mask.data()[i] ? 1.0 : 0.0;
  write_pgm16_raw(path, img, 1.0);
}

void write_mask_text(const std::filesystem::path& path, const SamplingMask& mask) {
  std::ofstream f = open_out(path, std::ios::out);
  for (int line : mask.acquired) f << line + 1 << "\n";
}

SamplingMask read_mask_text(const std::filesystem::path& path, int n_lines) {
  std::ifstream f(path);
  if (!f) throw config_error("cannot open mask file: " + path.string());
  SamplingMask mask;
  mask.n_lines = n_lines;
  int line;
  while (f >> line) mask.acquired.push_back(line - 1);
  mask.validate();
  return mask;
}

void write_kspace(const std::filesystem::path& path, const MultiCoilKSpace& y,
                  std::uint64_t seed, double eta) {
  static_assert(std::endian::native == std::endian::little,
                "k-space export assumes a little-endian host");
  std::ofstream f = open_out(path, std::ios::binary);
  f.write(reinterpret_cast<const char*>(y.data.data()),
          static_cast<std::streamsize>(y.data.size() * sizeof(cplx)));

  json side;
  side["shape"] = {y.mask.count(), y.cols, y.n_coils};
  side["order"] = "coil-major, interleaved re/im float64 little-endian";
  side["n_lines"] = y.mask.n_lines;
  std::vector<int> lines;
  lines.reserve(y.mask.acquired.size());
  for (int v : y.mask.acquired) lines.push_back(v + 1);
  side["acquired_lines"] = lines;
  side["seed"] = seed;
  side["eta"] = eta;
  std::filesystem::path sidecar = path;
  sidecar.replace_extension(".json");
  std::ofstream sf = open_out(sidecar, std::ios::out);
  sf << side.dump(2) << "\n";
}

MultiCoilKSpace read_kspace(const std::filesystem::path& path) {
  std::filesystem::path sidecar = path;
  sidecar.replace_extension(".json");
  std::ifstream sf(sidecar);
  if (!sf) throw config_error("cannot open k-space sidecar: " + sidecar.string());
  json side = json::parse(sf);

  SamplingMask mask;
  mask.n_lines = side.at("n_lines").get<int>();
  for (int v : side.at("acquired_lines").get<std::vector<int>>()) mask.acquired.push_back(v - 1);
  mask.validate();

  auto shape = side.at("shape").get<std::vector<int>>();
  if (shape.size() != 3 || shape[0] != mask.count())
    throw config_error("k-space sidecar shape is inconsistent");
  MultiCoilKSpace y(mask, shape[1], shape[2]);

  std::ifstream f(path, std::ios::binary);
  if (!f) throw config_error("cannot open k-space file: " + path.string());
  f.read(reinterpret_cast<char*>(y.data.data()),
         static_cast<std::streamsize>(y.data.size() * sizeof(cplx)));
  if (static_cast<std::size_t>(f.gcount()) != y.data.size() * sizeof(cplx))
    throw config_error("k-space file truncated: " + path.string());
  return y;
}

void write_trace_csv(const std::filesystem::path& path, const AlmaTrace& trace) {
  std::ofstream f = open_out(path, std::ios::out);
  f << "iteration,lambda,slope,hull_size,admm_iters,objective\n";
  for (const AlmaIteration& it : trace.iterations) {
    f << it.iteration << ',' << format_double(it.lambda) << ',' << format_double(it.slope) << ','
      << it.hull_size << ',' << it.admm_iterations << ',' << format_double(it.objective) << "\n";
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

}  // namespace alma
