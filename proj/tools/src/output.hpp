#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qgi::cli {

using json = nlohmann::ordered_json;

/// Non-finite value reached an output file.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "%.17g"; throws OutputError for NaN or infinity.
std::string format_double(double v);

/// RFC 4180 field quoting.
std::string csv_quote(const std::string& field);

std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

/// Throws OutputError if any number in `j` is not finite.
void require_finite(const json& j, const std::string& where);

/// Collects the files of one run and writes manifest.json last. Files are
/// listed in name order with their SHA-256, so the manifest only changes when
/// an output does (plus the creation time, which honours SOURCE_DATE_EPOCH).
class OutputSet {
 public:
  OutputSet(std::filesystem::path dir, std::string command, std::string config_hash);

  void write_text(const std::string& name, const std::string& text);
  void write_csv(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows);
  void write_json(const std::string& name, const json& j);

  void finish();

  const std::filesystem::path& dir() const { return dir_; }

 private:
  struct Entry {
    std::string name;
    std::string sha256;
    std::size_t bytes;
  };
  std::filesystem::path dir_;
  std::string command_;
  std::string config_hash_;
  std::vector<Entry> files_;
};

/// ISO-8601 UTC time from SOURCE_DATE_EPOCH when set, else the current time.
std::string creation_timestamp();

}  // namespace qgi::cli
