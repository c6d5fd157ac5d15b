#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace smoothq {

/// One row of a learning curve.
struct EpisodeRecord {
  std::size_t episode = 0;
  std::size_t steps = 0;
  double ret = 0.0;  // undiscounted sum of rewards
  double wall_ms = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

/// Header `episode,steps,return,wall_ms,seed`, reals printed with 6 significant digits.
void write_csv(const std::vector<EpisodeRecord>& records, std::ostream& out);
void write_csv(const std::vector<EpisodeRecord>& records, const std::filesystem::path& path);

/// Inverse of write_csv. Throws std::runtime_error on a malformed file.
std::vector<EpisodeRecord> read_csv(std::istream& in);
std::vector<EpisodeRecord> read_csv(const std::filesystem::path& path);

}  // namespace smoothq
