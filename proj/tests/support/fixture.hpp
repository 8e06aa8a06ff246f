#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace weft::testing {

std::filesystem::path fixture_dir(const std::string& name = "shop");

std::string slurp(const std::filesystem::path& path);
void spit(const std::filesystem::path& path, const std::string& contents);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Copies a fixture into `dest`, skipping golden outputs and run output.
void copy_fixture(const std::filesystem::path& src, const std::filesystem::path& dest);

/// file name -> contents for every regular file directly in `dir`.
std::map<std::string, std::string> read_outputs(const std::filesystem::path& dir);

}  // namespace weft::testing
