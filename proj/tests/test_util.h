#ifndef CHARTLINK_TESTS_TEST_UTIL_H_
#define CHARTLINK_TESTS_TEST_UTIL_H_

#include <atomic>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <cstdlib>
#include <sys/wait.h>
#include <unistd.h>

#include "chartlink/corpus.h"
#include "chartlink/nlp.h"

namespace chartlink::testing {

namespace fs = std::filesystem;

inline fs::path SourceDir() { return CHARTLINK_SOURCE_DIR; }
inline fs::path CorpusDir() { return SourceDir() / "data" / "corpus"; }
inline fs::path FixturesDir() { return SourceDir() / "tests" / "fixtures"; }
inline std::string CliPath() { return CHARTLINK_CLI; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("chartlink-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const fs::path &path() const { return path_; }
  fs::path operator/(const std::string &name) const { return path_ / name; }

 private:
  fs::path path_;
};

// Copies a case directory (without links.json) into `dest`.
inline fs::path CopyCase(const fs::path &src, const fs::path &dest_root) {
  fs::path dest = dest_root / src.filename();
  fs::create_directories(dest);
  for (const auto &entry : fs::directory_iterator(src)) {
    if (entry.path().filename() == "links.json") continue;
    fs::copy(entry.path(), dest / entry.path().filename(),
             fs::copy_options::recursive | fs::copy_options::overwrite_existing);
  }
  return dest;
}

inline std::shared_ptr<FixtureBackend> BackendFor(const fs::path &dir) {
  auto backend = std::make_shared<FixtureBackend>();
  backend->AddDirectory(dir);
  return backend;
}

inline std::shared_ptr<FixtureBackend> BackendForFile(const fs::path &file) {
  auto backend = std::make_shared<FixtureBackend>();
  backend->AddFile(file);
  return backend;
}

inline int RunCommand(const std::string &command) {
  int status = std::system((command + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace chartlink::testing

#endif  // CHARTLINK_TESTS_TEST_UTIL_H_
