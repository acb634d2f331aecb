#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>

namespace nc {

// Flat key=value settings. '#' starts a comment; blank lines are ignored.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source);
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  // Typed access; a malformed value raises UsageError naming the key.
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  long get_long(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  // Rejects keys outside `known`.
  void require_known(const std::set<std::string>& known) const;

  std::string to_string() const;
  void write(const std::filesystem::path& path) const;

 private:
  const std::string& raw(const std::string& key) const;

  std::map<std::string, std::string> entries_;
};

}  // namespace nc
