#include "atomic_file.hpp"

#include <unistd.h>

#include <system_error>

#include "bmikit/errors.hpp"

namespace bmikit::cli {

AtomicFile::AtomicFile(std::filesystem::path target)
    : target_(std::move(target)),
      temp_(target_.string() + ".tmp." + std::to_string(::getpid())),
      stream_(temp_, std::ios::binary | std::ios::trunc) {
  if (!stream_) throw Error("cannot write " + target_.string());
}

AtomicFile::~AtomicFile() {
  if (committed_) return;
  stream_.close();
  std::error_code ignored;
  std::filesystem::remove(temp_, ignored);
}

void AtomicFile::commit() {
  stream_.flush();
  if (!stream_) throw Error("failed writing " + target_.string());
  stream_.close();
  std::error_code ec;
  std::filesystem::rename(temp_, target_, ec);
  if (ec) throw Error("cannot move output into place at " + target_.string() + ": " + ec.message());
  committed_ = true;
}

}  // namespace bmikit::cli
