#pragma once

#include "nc/sampler.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nc {

// Metadata written as '# key=value' lines ahead of the CSV body.
struct DatasetHeader {
  int dimension = 1;
  int order = 1;
  std::string algorithm;
  std::uint64_t seed = 0;
  double delta = 0.0;
  double tau = 0.0;
  double box_lo = 0.0;
  double box_hi = 0.0;
  // Quadrature the labels were computed on.
  int n_mu = 0;
  int n_phi = 0;
  // Anything else found in the header is kept verbatim.
  std::map<std::string, std::string> extra;
};

struct Dataset {
  DatasetHeader header;
  std::vector<ClosureSample> samples;
};

// Row layout: u_1..u_N, alpha_0..alpha_N, h, all in shortest round-trip
// decimal form.
void write_dataset(const Dataset& data, const std::filesystem::path& path);

// Throws ParseError (with line number) on malformed content,
// EmptyDatasetError when there are no rows, HeaderMismatchError when the
// file's dimension/order differ from the expected ones.
Dataset read_dataset(const std::filesystem::path& path,
                     std::optional<std::pair<int, int>> expected_dimension_order = std::nullopt);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double x);
double parse_double(const std::string& text);

}  // namespace nc
