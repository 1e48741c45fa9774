#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

namespace drugrec::testing {

struct FixtureOptions {
  std::size_t rows = 2000;
  std::uint64_t seed = 7;
  /// Every 50th row has no condition and every 97th has a scraping-artifact condition.
  bool include_dirty_rows = true;
};

/// Synthetic review corpus in the distributed TSV layout. Review wording is
/// drawn from positive or negative phrase pools according to the rating, so
/// text features carry real signal.
std::string fixture_tsv(const FixtureOptions& options = {});

/// Writes fixture_tsv() to `path`, creating parent directories.
void write_fixture(const std::filesystem::path& path, const FixtureOptions& options = {});

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace drugrec::testing
