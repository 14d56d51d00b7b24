/* Copyright 2026 The Loadgauge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "loadgauge/bridge.h"

#include <csignal>
#include <cstring>

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <stdexcept>
#include <utility>

namespace loadgauge {
namespace {

void AppendU32(uint32_t value, std::string* out) {
  for (int shift = 0; shift < 32; shift += 8) {
    out->push_back(static_cast<char>((value >> shift) & 0xff));
  }
}

void AppendU64(uint64_t value, std::string* out) {
  for (int shift = 0; shift < 64; shift += 8) {
    out->push_back(static_cast<char>((value >> shift) & 0xff));
  }
}

uint32_t LoadU32(const unsigned char* p) {
  uint32_t value = 0;
  for (int i = 3; i >= 0; --i) {
    value = (value << 8) | p[i];
  }
  return value;
}

uint64_t LoadU64(const unsigned char* p) {
  uint64_t value = 0;
  for (int i = 7; i >= 0; --i) {
    value = (value << 8) | p[i];
  }
  return value;
}

void WriteAll(int fd, const char* data, size_t size) {
  while (size > 0) {
    const ssize_t n = ::write(fd, data, size);
    if (n < 0) {
      if (errno == EINTR) {
        continue;
      }
      throw std::runtime_error(std::string("bridge write: ") +
                               std::strerror(errno));
    }
    data += n;
    size -= static_cast<size_t>(n);
  }
}

/// \brief Returns bytes read: `size` on success, 0 on EOF at a frame
/// boundary. EOF inside a frame throws.
size_t ReadAll(int fd, char* data, size_t size) {
  size_t total = 0;
  while (total < size) {
    const ssize_t n = ::read(fd, data + total, size - total);
    if (n < 0) {
      if (errno == EINTR) {
        continue;
      }
      throw std::runtime_error(std::string("bridge read: ") +
                               std::strerror(errno));
    }
    if (n == 0) {
      if (total == 0) {
        return 0;
      }
      throw std::runtime_error("bridge read: stream ended inside a frame");
    }
    total += static_cast<size_t>(n);
  }
  return total;
}

}  // namespace

void EncodeFrame(int64_t query_id, std::span<const uint64_t> words,
                 std::string* out) {
  const uint32_t payload =
      static_cast<uint32_t>(8 + 4 + 8 * words.size());
  AppendU32(payload, out);
  AppendU64(static_cast<uint64_t>(query_id), out);
  AppendU32(static_cast<uint32_t>(words.size()), out);
  for (uint64_t word : words) {
    AppendU64(word, out);
  }
}

void WriteFrame(int fd, int64_t query_id, std::span<const uint64_t> words) {
  std::string buffer;
  buffer.reserve(16 + 8 * words.size());
  EncodeFrame(query_id, words, &buffer);
  WriteAll(fd, buffer.data(), buffer.size());
}

bool ReadFrame(int fd, BridgeFrame* frame) {
  char head[4];
  if (ReadAll(fd, head, sizeof(head)) == 0) {
    return false;
  }
  const uint32_t payload =
      LoadU32(reinterpret_cast<const unsigned char*>(head));
  if (payload < 12 || payload > kMaxFramePayload || (payload - 12) % 8 != 0) {
    throw std::runtime_error("bridge read: bad frame length");
  }
  std::vector<char> body(payload);
  if (ReadAll(fd, body.data(), body.size()) == 0) {
    throw std::runtime_error("bridge read: stream ended inside a frame");
  }
  const unsigned char* p = reinterpret_cast<const unsigned char*>(body.data());
  frame->query_id = static_cast<int64_t>(LoadU64(p));
  const uint32_t count = LoadU32(p + 8);
  if (count != (payload - 12) / 8) {
    throw std::runtime_error("bridge read: word count disagrees with length");
  }
  frame->words.resize(count);
  for (uint32_t i = 0; i < count; ++i) {
    frame->words[i] = LoadU64(p + 12 + 8 * static_cast<size_t>(i));
  }
  return true;
}

SubprocessSut::SubprocessSut(std::vector<std::string> argv, std::string name)
    : argv_(std::move(argv)), name_(std::move(name)) {
  if (argv_.empty()) {
    throw std::invalid_argument("subprocess SUT needs a command line");
  }
}

SubprocessSut::~SubprocessSut() { Reap(); }

void SubprocessSut::OnRunStart(const RunContext& /*context*/) {
  Reap();
  // A child that exits mid-run would otherwise kill this process with
  // SIGPIPE on the next issue; with the signal ignored the write fails
  // with EPIPE and the run ends at the watchdog instead.
  ::signal(SIGPIPE, SIG_IGN);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    reader_done_ = false;
    flush_acked_ = false;
    failed_ = false;
  }
  Spawn();
  reader_ = std::thread([this] { ReaderLoop(); });
}

void SubprocessSut::OnRunEnd() { Reap(); }

void SubprocessSut::Spawn() {
  int to_child[2];
  int from_child[2];
  if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
    throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    throw std::runtime_error(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    std::vector<char*> args;
    args.reserve(argv_.size() + 1);
    for (const std::string& arg : argv_) {
      args.push_back(const_cast<char*>(arg.c_str()));
    }
    args.push_back(nullptr);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  child_pid_ = pid;
  to_child_ = to_child[1];
  from_child_ = from_child[0];
}

void SubprocessSut::Reap() {
  if (to_child_ >= 0) {
    ::close(to_child_);
    to_child_ = -1;
  }
  // Wait for the child before joining the reader: once the child is gone
  // its end of the output pipe closes and the reader sees end of stream,
  // even for a child that ignored the stdin close.
  if (child_pid_ > 0) {
    int status = 0;
    bool reaped = false;
    for (int i = 0; i < 500 && !reaped; ++i) {
      const pid_t done = ::waitpid(child_pid_, &status, WNOHANG);
      if (done == child_pid_ || done < 0) {
        reaped = true;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (!reaped) {
      ::kill(child_pid_, SIGKILL);
      ::waitpid(child_pid_, &status, 0);
    }
    child_pid_ = -1;
  }
  if (reader_.joinable()) {
    reader_.join();
  }
  if (from_child_ >= 0) {
    ::close(from_child_);
    from_child_ = -1;
  }
}

void SubprocessSut::IssueQuery(const Query& query) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (failed_ || to_child_ < 0) {
    return;
  }
  try {
    WriteFrame(to_child_,
               query.query_id,
               std::span<const uint64_t>(query.sample_indices.data(),
                                         query.sample_indices.size()));
  } catch (const std::runtime_error&) {
    failed_ = true;
  }
}

void SubprocessSut::Flush() {
  std::unique_lock<std::mutex> lock(mutex_);
  if (failed_ || to_child_ < 0) {
    return;
  }
  flush_acked_ = false;
  try {
    WriteFrame(to_child_, kFlushQueryId, {});
  } catch (const std::runtime_error&) {
    failed_ = true;
    return;
  }
  flush_cv_.wait(lock, [this] { return flush_acked_ || reader_done_; });
}

void SubprocessSut::ReaderLoop() {
  BridgeFrame frame;
  try {
    while (ReadFrame(from_child_, &frame)) {
      if (frame.query_id == kFlushQueryId) {
        std::lock_guard<std::mutex> lock(mutex_);
        flush_acked_ = true;
        flush_cv_.notify_all();
        continue;
      }
      QueryResponse response;
      response.query_id = frame.query_id;
      response.sample_digests = std::move(frame.words);
      response.payload_digest = CombineDigests(response.sample_digests);
      Respond(response);
    }
  } catch (const std::runtime_error&) {
    std::lock_guard<std::mutex> lock(mutex_);
    failed_ = true;
  }
  std::lock_guard<std::mutex> lock(mutex_);
  reader_done_ = true;
  flush_cv_.notify_all();
}

}  // namespace loadgauge
