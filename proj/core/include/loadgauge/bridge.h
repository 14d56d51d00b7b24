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

#ifndef LOADGAUGE_CORE_BRIDGE_H_
#define LOADGAUGE_CORE_BRIDGE_H_

#include <sys/types.h>

#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "loadgauge/sut.h"

namespace loadgauge {

/// \brief Frame protocol spoken between the harness and a subprocess SUT.
///
/// Each direction carries a stream of frames:
///
///   uint32 payload_length   number of bytes after this field
///   int64  query_id
///   uint32 word_count
///   uint64 words[word_count]
///
/// All fields are little-endian. Harness to child, the words are the sample
/// indices of one query. Child to harness, the words are the per-sample
/// result digests for that query, in the same order as the indices.
///
/// A frame with query_id == kFlushQueryId and no words asks the child to
/// finish all outstanding work; the child acknowledges with the same frame
/// once every earlier query has been answered. Closing the child's stdin
/// ends the session, and the child is expected to exit.
inline constexpr int64_t kFlushQueryId = -1;

/// \brief Upper bound on the payload length of a single frame, as a guard
/// against reading garbage lengths from a corrupted stream.
inline constexpr uint32_t kMaxFramePayload = 16u << 20;

/// \brief One decoded frame.
struct BridgeFrame {
  int64_t query_id = 0;
  std::vector<uint64_t> words;
};

/// \brief Appends the encoding of one frame to `out`.
void EncodeFrame(int64_t query_id, std::span<const uint64_t> words,
                 std::string* out);

/// \brief Writes one frame to `fd`, retrying on short writes.
///
/// Throws std::runtime_error when the descriptor rejects the write.
void WriteFrame(int fd, int64_t query_id, std::span<const uint64_t> words);

/// \brief Reads one frame from `fd`, retrying on short reads.
///
/// Returns false on clean end of stream before any byte of a frame.
/// Throws std::runtime_error on a truncated or oversized frame.
bool ReadFrame(int fd, BridgeFrame* frame);

/// \brief SUT served by a child process over pipes.
///
/// The child is spawned at OnRunStart and reaped at OnRunEnd. Queries are
/// written to its stdin as frames and responses are read from its stdout by
/// a dedicated reader thread, so issue and completion never block each
/// other. The bridge carries real time only: under a virtual clock there are
/// no schedulable events behind a response, so a run would stop at the
/// harness watchdog.
///
/// A child that exits early or writes a malformed frame stops the reader;
/// queries in flight then never complete and the harness watchdog records
/// the abort. Issue and flush themselves never throw once the run started.
class SubprocessSut : public SutInterface {
 public:
  /// \brief `argv` is the child command line, argv[0] the program.
  explicit SubprocessSut(std::vector<std::string> argv,
                         std::string name = "subprocess");
  ~SubprocessSut() override;

  SubprocessSut(const SubprocessSut&) = delete;
  SubprocessSut& operator=(const SubprocessSut&) = delete;

  std::string_view Name() const override { return name_; }
  void OnRunStart(const RunContext& context) override;
  void OnRunEnd() override;
  void IssueQuery(const Query& query) override;
  void Flush() override;

 private:
  void Spawn();
  void Reap();
  void ReaderLoop();

  const std::vector<std::string> argv_;
  const std::string name_;

  std::mutex mutex_;
  std::condition_variable flush_cv_;
  pid_t child_pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::thread reader_;
  bool reader_done_ = false;
  bool flush_acked_ = false;
  bool failed_ = false;
};

}  // namespace loadgauge

#endif  // LOADGAUGE_CORE_BRIDGE_H_
