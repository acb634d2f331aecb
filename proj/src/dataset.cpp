#include "nc/dataset.hpp"

#include "nc/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace nc {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  // from_chars does not accept a leading '+'
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
  if (first < last && *first == '+') ++first;
  double value = 0.0;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw UsageError("not a number: '" + text + "'");
  }
  return value;
}

namespace {

int reduced_size(int dimension, int order) { return dimension == 2 ? 2 : order; }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string column_header(int n_reduced) {
  std::ostringstream os;
  for (int i = 1; i <= n_reduced; ++i) os << "u" << i << ",";
  for (int i = 0; i <= n_reduced; ++i) os << "alpha" << i << ",";
  os << "h";
  return os.str();
}

}  // namespace

void write_dataset(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const auto& h = data.header;
  const int n = reduced_size(h.dimension, h.order);
  out << "# neural-closure dataset v1\n";
  out << "# dimension=" << h.dimension << "\n";
  out << "# order=" << h.order << "\n";
  out << "# algorithm=" << h.algorithm << "\n";
  out << "# seed=" << h.seed << "\n";
  out << "# delta=" << format_double(h.delta) << "\n";
  out << "# tau=" << format_double(h.tau) << "\n";
  out << "# box_lo=" << format_double(h.box_lo) << "\n";
  out << "# box_hi=" << format_double(h.box_hi) << "\n";
  out << "# n_mu=" << h.n_mu << "\n";
  out << "# n_phi=" << h.n_phi << "\n";
  for (const auto& [k, v] : h.extra) out << "# " << k << "=" << v << "\n";
  out << "# count=" << data.samples.size() << "\n";
  out << column_header(n) << "\n";
  for (const auto& s : data.samples) {
    if (s.u.size() != n + 1 || s.alpha.size() != n + 1) {
      throw UsageError("write_dataset: sample size does not match header dimension/order");
    }
    for (int i = 1; i <= n; ++i) out << format_double(s.u(i)) << ",";
    for (int i = 0; i <= n; ++i) out << format_double(s.alpha(i)) << ",";
    out << format_double(s.h) << "\n";
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

Dataset read_dataset(const std::filesystem::path& path,
                     std::optional<std::pair<int, int>> expected_dimension_order) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");

  Dataset data;
  auto& h = data.header;
  bool saw_magic = false;
  bool saw_columns = false;
  int n = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      while (!body.empty() && body.front() == ' ') body.erase(body.begin());
      if (body.rfind("neural-closure dataset", 0) == 0) {
        if (body != "neural-closure dataset v1") throw ParseError("unsupported dataset version", line_no);
        saw_magic = true;
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;  // free-form comment
      const std::string key = body.substr(0, eq);
      const std::string value = body.substr(eq + 1);
      try {
        if (key == "dimension") h.dimension = std::stoi(value);
        else if (key == "order") h.order = std::stoi(value);
        else if (key == "algorithm") h.algorithm = value;
        else if (key == "seed") h.seed = std::stoull(value);
        else if (key == "delta") h.delta = parse_double(value);
        else if (key == "tau") h.tau = parse_double(value);
        else if (key == "box_lo") h.box_lo = parse_double(value);
        else if (key == "box_hi") h.box_hi = parse_double(value);
        else if (key == "n_mu") h.n_mu = std::stoi(value);
        else if (key == "n_phi") h.n_phi = std::stoi(value);
        else if (key != "count") h.extra[key] = value;
      } catch (const std::exception&) {
        throw ParseError("bad header value for '" + key + "'", line_no);
      }
      continue;
    }
    if (!saw_columns) {
      if (!saw_magic) throw ParseError("missing dataset magic line", line_no);
      if (h.dimension != 1 && h.dimension != 2) throw ParseError("invalid dimension in header", line_no);
      if (expected_dimension_order &&
          (expected_dimension_order->first != h.dimension || expected_dimension_order->second != h.order)) {
        throw HeaderMismatchError("dataset '" + path.string() + "' has dimension " +
                                  std::to_string(h.dimension) + " order " + std::to_string(h.order) +
                                  ", expected dimension " + std::to_string(expected_dimension_order->first) +
                                  " order " + std::to_string(expected_dimension_order->second));
      }
      n = reduced_size(h.dimension, h.order);
      if (line != column_header(n)) throw ParseError("unexpected column header '" + line + "'", line_no);
      saw_columns = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (static_cast<int>(fields.size()) != 2 * n + 2) {
      throw ParseError("expected " + std::to_string(2 * n + 2) + " fields, found " +
                       std::to_string(fields.size()), line_no);
    }
    ClosureSample s;
    s.u.resize(n + 1);
    s.alpha.resize(n + 1);
    try {
      s.u(0) = 1.0;
      for (int i = 0; i < n; ++i) s.u(i + 1) = parse_double(fields[i]);
      for (int i = 0; i <= n; ++i) s.alpha(i) = parse_double(fields[n + i]);
      s.h = parse_double(fields[2 * n + 1]);
    } catch (const UsageError& e) {
      throw ParseError(e.what(), line_no);
    }
    data.samples.push_back(std::move(s));
  }
  if (!saw_magic) throw ParseError("missing dataset magic line", line_no);
  if (data.samples.empty()) throw EmptyDatasetError("dataset '" + path.string() + "' contains no samples");
  return data;
}

}  // namespace nc
