#include "smoothq/records.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace smoothq {

namespace {

constexpr const char* kHeader = "episode,steps,return,wall_ms,seed";

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void write_csv(const std::vector<EpisodeRecord>& records, std::ostream& out) {
  out << kHeader << '\n';
  for (const EpisodeRecord& r : records) {
    out << r.episode << ',' << r.steps << ',' << format_real(r.ret) << ','
        << format_real(r.wall_ms) << ',' << r.seed << '\n';
  }
}

void write_csv(const std::vector<EpisodeRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(records, out);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<EpisodeRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw std::runtime_error("read_csv: missing or unexpected header");
  }
  std::vector<EpisodeRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field[5];
    for (int i = 0; i < 5; ++i) {
      if (!std::getline(row, field[i], ',')) {
        throw std::runtime_error("read_csv: line " + std::to_string(line_no) + " has fewer than 5 columns");
      }
    }
    std::string extra;
    if (std::getline(row, extra)) {
      throw std::runtime_error("read_csv: line " + std::to_string(line_no) + " has extra columns");
    }
    try {
      EpisodeRecord r;
      r.episode = std::stoull(field[0]);
      r.steps = std::stoull(field[1]);
      r.ret = std::stod(field[2]);
      r.wall_ms = std::stod(field[3]);
      r.seed = std::stoull(field[4]);
      records.push_back(r);
    } catch (const std::logic_error&) {
      throw std::runtime_error("read_csv: line " + std::to_string(line_no) + " is not numeric");
    }
  }
  return records;
}

std::vector<EpisodeRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_csv(in);
}

}  // namespace smoothq
