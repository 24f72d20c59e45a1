#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include "config.hpp"

#ifndef QGI_VERSION
#define QGI_VERSION "0.0.0"
#endif

namespace qgi::cli {

std::string format_double(double v) {
  if (!std::isfinite(v)) throw OutputError("refusing to write a non-finite value");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += csv_quote(header[i]);
  }
  out += "\r\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw OutputError("CSV row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                        " cells, header has " + std::to_string(header.size()));
    }
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      if (i) out += ',';
      try {
        out += format_double(rows[r][i]);
      } catch (const OutputError&) {
        throw OutputError("non-finite value in column '" + header[i] + "', row " +
                          std::to_string(r));
      }
    }
    out += "\r\n";
  }
  return out;
}

void require_finite(const json& j, const std::string& where) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) {
    throw OutputError("non-finite value at " + where);
  }
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) require_finite(v, where + "." + k);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) require_finite(j[i], where + "[" + std::to_string(i) + "]");
  }
}

std::string creation_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end && *end == '\0' && v >= 0) t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

OutputSet::OutputSet(std::filesystem::path dir, std::string command, std::string config_hash)
    : dir_(std::move(dir)), command_(std::move(command)), config_hash_(std::move(config_hash)) {
  std::filesystem::create_directories(dir_);
}

void OutputSet::write_text(const std::string& name, const std::string& text) {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw std::runtime_error("write failed for " + path.string());
  files_.push_back({name, sha256_hex(text), text.size()});
}

void OutputSet::write_csv(const std::string& name, const std::vector<std::string>& header,
                          const std::vector<std::vector<double>>& rows) {
  write_text(name, csv_text(header, rows));
}

void OutputSet::write_json(const std::string& name, const json& j) {
  require_finite(j, name);
  write_text(name, j.dump(2) + "\n");
}

void OutputSet::finish() {
  auto files = files_;
  std::sort(files.begin(), files.end(), [](const Entry& a, const Entry& b) { return a.name < b.name; });
  json m;
  m["tool"] = "qgi";
  m["version"] = QGI_VERSION;
  m["command"] = command_;
  m["config_sha256"] = config_hash_;
  m["created"] = creation_timestamp();
  m["outputs"] = json::array();
  for (const auto& f : files) {
    m["outputs"].push_back({{"file", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  }
  const std::string text = m.dump(2) + "\n";
  std::ofstream out(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write manifest.json");
}

}  // namespace qgi::cli
