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

#include <unistd.h>

#include <cstring>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "loadgauge/harness.h"
#include "loadgauge/report.h"

namespace loadgauge {
namespace {

struct Pipe {
  int fds[2] = {-1, -1};
  Pipe() { REQUIRE(pipe(fds) == 0); }
  ~Pipe() {
    CloseRead();
    CloseWrite();
  }
  int read_fd() const { return fds[0]; }
  int write_fd() const { return fds[1]; }
  void CloseRead() {
    if (fds[0] != -1) close(fds[0]);
    fds[0] = -1;
  }
  void CloseWrite() {
    if (fds[1] != -1) close(fds[1]);
    fds[1] = -1;
  }
};

void WriteRaw(int fd, const std::string& bytes) {
  REQUIRE(write(fd, bytes.data(), bytes.size()) ==
          static_cast<ssize_t>(bytes.size()));
}

TEST_CASE("frames encode little-endian with an exact layout") {
  std::string out;
  const std::vector<uint64_t> words = {0x1122334455667788ULL, 0x99ULL};
  EncodeFrame(2, words, &out);

  // 4 length + 8 id + 4 count + 16 words.
  REQUIRE(out.size() == 32);
  const auto byte = [&](size_t i) { return static_cast<unsigned char>(out[i]); };
  CHECK(byte(0) == 28);  // payload_length = 8 + 4 + 16
  CHECK(byte(1) == 0);
  CHECK(byte(2) == 0);
  CHECK(byte(3) == 0);
  CHECK(byte(4) == 2);  // query_id
  CHECK(byte(11) == 0);
  CHECK(byte(12) == 2);  // word_count
  CHECK(byte(16) == 0x88);  // least significant byte of words[0]
  CHECK(byte(23) == 0x11);
  CHECK(byte(24) == 0x99);
}

TEST_CASE("a frame written to a pipe reads back unchanged") {
  Pipe channel;
  const std::vector<uint64_t> words = {7, 8, 9};
  WriteFrame(channel.write_fd(), 41, words);
  WriteFrame(channel.write_fd(), kFlushQueryId, {});

  BridgeFrame frame;
  REQUIRE(ReadFrame(channel.read_fd(), &frame));
  CHECK(frame.query_id == 41);
  CHECK(frame.words == words);

  REQUIRE(ReadFrame(channel.read_fd(), &frame));
  CHECK(frame.query_id == kFlushQueryId);
  CHECK(frame.words.empty());
}

TEST_CASE("clean end of stream reads as false, not an error") {
  Pipe channel;
  channel.CloseWrite();
  BridgeFrame frame;
  CHECK(!ReadFrame(channel.read_fd(), &frame));
}

TEST_CASE("a stream that ends inside a frame is an error") {
  Pipe channel;
  std::string bytes;
  EncodeFrame(5, std::vector<uint64_t>{1, 2, 3}, &bytes);
  WriteRaw(channel.write_fd(), bytes.substr(0, 9));
  channel.CloseWrite();
  BridgeFrame frame;
  CHECK_THROWS_AS(ReadFrame(channel.read_fd(), &frame),
                  std::runtime_error);
}

TEST_CASE("corrupt payload lengths are rejected") {
  const auto reject = [](const std::string& bytes) {
    Pipe channel;
    WriteRaw(channel.write_fd(), bytes);
    channel.CloseWrite();
    BridgeFrame frame;
    CHECK_THROWS_AS(ReadFrame(channel.read_fd(), &frame),
                    std::runtime_error);
  };

  // Shorter than the fixed id+count section.
  std::string too_short(4, '\0');
  too_short[0] = 4;
  too_short += std::string(4, '\0');
  reject(too_short);

  // Not a whole number of words after the fixed section.
  std::string ragged(4, '\0');
  ragged[0] = 15;  // 12 + 3
  ragged += std::string(15, '\0');
  reject(ragged);

  // Larger than any frame the protocol allows: 0x4100000c > 16 MiB.
  std::string huge(4, '\0');
  huge[0] = 0x0c;
  huge[3] = 0x41;
  huge += std::string(16, '\0');
  reject(huge);

  // Word count that disagrees with the payload length.
  std::string mismatch;
  EncodeFrame(1, std::vector<uint64_t>{6}, &mismatch);
  mismatch[12] = 2;  // claims two words, carries one
  reject(mismatch);
}

TEST_CASE("the subprocess SUT answers queries through the echo child") {
  WallClock clock;
  SubprocessSut sut({ECHO_SUT_PATH});
  CHECK(sut.Name() == "subprocess");
  InMemorySampleLibrary library(64);

  TestSettings settings;
  settings.scenario = Scenario::kSingleStream;
  settings.task_name = "image-classification-heavy";
  settings.min_query_count = 16;
  settings.min_duration = DurationFromMillis(1);
  settings.clock = ClockMode::kWall;
  const SettingsValidation validation =
      ValidateSettings(settings, BuiltinProfiles());
  REQUIRE(validation.ok());

  HarnessOptions options;
  options.watchdog_timeout = DurationFromSeconds(10);
  options.accuracy_digest_sampling = 1.0;
  const RunLog log =
      RunPerformance(sut, library, *validation.resolved, clock, options);

  REQUIRE(!log.aborted);
  // The closed loop keeps issuing until the wall-clock duration floor is
  // met, so the count is only bounded below.
  CHECK(log.records.size() >= 16);
  CHECK(CheckValidity(log).valid);
  REQUIRE(log.accuracy_entries.size() == log.records.size());
  for (const AccuracyEntry& entry : log.accuracy_entries) {
    CHECK(entry.digest == ReferencePayloadDigest(entry.sample_index));
  }
}

TEST_CASE("an accuracy run over the bridge scores the reference answers") {
  WallClock clock;
  SubprocessSut sut({ECHO_SUT_PATH});
  InMemorySampleLibrary library(48);

  TestSettings settings;
  settings.scenario = Scenario::kSingleStream;
  settings.task_name = "image-classification-heavy";
  settings.mode = TestMode::kAccuracy;
  settings.clock = ClockMode::kWall;
  const SettingsValidation validation =
      ValidateSettings(settings, BuiltinProfiles());
  REQUIRE(validation.ok());

  HarnessOptions options;
  options.watchdog_timeout = DurationFromSeconds(10);
  const RunLog log =
      RunAccuracy(sut, library, *validation.resolved, clock, options);

  REQUIRE(!log.aborted);
  CHECK(log.records.size() == 48);
  REQUIRE(log.measured_accuracy.has_value());
  CHECK(*log.measured_accuracy == doctest::Approx(76.456).epsilon(1e-12));
}

TEST_CASE("flush returns only after every earlier query is answered") {
  SubprocessSut sut({ECHO_SUT_PATH, "2"}, "echo-with-delay");
  CHECK(sut.Name() == "echo-with-delay");

  std::mutex mu;
  std::vector<QueryResponse> responses;
  sut.SetResponseCallback([&](QueryResponse response) {
    std::lock_guard<std::mutex> lock(mu);
    responses.push_back(std::move(response));
  });
  sut.OnRunStart({Scenario::kSingleStream, TestMode::kPerformance});

  const std::vector<SampleIndex> q0 = {0};
  const std::vector<SampleIndex> q1 = {1, 2};
  const std::vector<SampleIndex> q2 = {3};
  Query query;
  query.query_id = 0;
  query.sample_indices = q0;
  sut.IssueQuery(query);
  query.query_id = 1;
  query.sample_indices = q1;
  sut.IssueQuery(query);
  query.query_id = 2;
  query.sample_indices = q2;
  sut.IssueQuery(query);
  sut.Flush();

  {
    std::lock_guard<std::mutex> lock(mu);
    REQUIRE(responses.size() == 3);
    CHECK(responses[1].query_id == 1);
    REQUIRE(responses[1].sample_digests.size() == 2);
    CHECK(responses[1].sample_digests[0] == ReferencePayloadDigest(1));
    CHECK(responses[1].sample_digests[1] == ReferencePayloadDigest(2));
    CHECK(responses[2].sample_digests[0] == ReferencePayloadDigest(3));
  }
  sut.OnRunEnd();
}

TEST_CASE("a child that exits immediately ends in a watchdog abort") {
  WallClock clock;
  SubprocessSut sut({"/bin/true"});
  InMemorySampleLibrary library(16);

  TestSettings settings;
  settings.scenario = Scenario::kSingleStream;
  settings.task_name = "image-classification-heavy";
  settings.min_query_count = 4;
  settings.min_duration = DurationFromMillis(1);
  settings.clock = ClockMode::kWall;
  const SettingsValidation validation =
      ValidateSettings(settings, BuiltinProfiles());
  REQUIRE(validation.ok());

  HarnessOptions options;
  options.watchdog_timeout = DurationFromMillis(200);
  const RunLog log =
      RunPerformance(sut, library, *validation.resolved, clock, options);

  CHECK(log.aborted);
  CHECK(log.abort_reason.find("watchdog") != std::string::npos);
  CHECK(!CheckValidity(log).valid);
}

TEST_CASE("the subprocess SUT needs a command line") {
  CHECK_THROWS_AS(SubprocessSut({}), std::invalid_argument);
}

}  // namespace
}  // namespace loadgauge
