#pragma once

#include <filesystem>
#include <fstream>
#include <string>

namespace bmikit::cli {

// Writes go to a sibling temp file that replaces `target` on commit(). If
// the object is destroyed uncommitted the temp file is removed, so a failed
// run never leaves a truncated output behind.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path target);
  ~AtomicFile();

  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ofstream& stream() { return stream_; }
  void commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path temp_;
  std::ofstream stream_;
  bool committed_ = false;
};

}  // namespace bmikit::cli
