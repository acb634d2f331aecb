#include "nc/config.hpp"

#include "nc/dataset.hpp"
#include "nc/errors.hpp"

#include <fstream>
#include <sstream>

namespace nc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw UsageError("config key '" + key + "': expected " + expected + ", got '" + value + "'");
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
  Config c;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty()) {
      throw UsageError(source + ":" + std::to_string(line_no) + ": expected key=value");
    }
    c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  return parse(in, path.string());
}

const std::string& Config::raw(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw UsageError("config key '" + key + "' is missing");
  return it->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

double Config::get_double(const std::string& key) const {
  const std::string& v = raw(key);
  try {
    return parse_double(v);
  } catch (const UsageError&) {
    bad_value(key, v, "a number");
  }
}

long Config::get_long(const std::string& key) const {
  const std::string& v = raw(key);
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  // accept integral values written in floating-point form such as 1e4
  try {
    const double d = parse_double(v);
    if (d == static_cast<double>(static_cast<long>(d))) return static_cast<long>(d);
  } catch (const UsageError&) {
  }
  bad_value(key, v, "an integer");
}

int Config::get_int(const std::string& key) const {
  const long x = get_long(key);
  if (x < INT32_MIN || x > INT32_MAX) bad_value(key, raw(key), "an integer in int range");
  return static_cast<int>(x);
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const std::string& v = raw(key);
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] != '-') {
      const unsigned long long x = std::stoull(v, &used);
      if (used == v.size()) return x;
    }
  } catch (const std::exception&) {
  }
  bad_value(key, v, "a nonnegative integer");
}

bool Config::get_bool(const std::string& key) const {
  const std::string& v = raw(key);
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  bad_value(key, v, "true or false");
}

void Config::require_known(const std::set<std::string>& known) const {
  for (const auto& [k, v] : entries_) {
    if (!known.count(k)) throw UsageError("unknown config key '" + k + "'");
  }
}

std::string Config::to_string() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries_) os << k << " = " << v << "\n";
  return os.str();
}

void Config::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << to_string();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace nc
