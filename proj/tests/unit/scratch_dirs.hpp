#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("dscale_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline constexpr const char* kSmallFreeSpread = R"(# small free-spread run
[scenario]
schema_version = 1
kind = free-spread
[grid]
dim = 1
lower = -16
upper = 16
points = 256
[physics]
hbar = 1
mass = 1
[packet]
center = -2
velocity = 1
width = 1
[time]
dt = 0.004
steps = 100
store_every = 10
[ensemble]
count = 6000
seed = 3
)";
