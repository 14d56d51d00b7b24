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

// Minimal subprocess SUT: answers every query with the canonical reference
// digests. Serves as the worked example for the frame protocol and as the
// far end of the bridge tests. An optional argument adds a fixed per-query
// delay in milliseconds.

#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <thread>
#include <vector>

#include "loadgauge/bridge.h"
#include "loadgauge/sut.h"

int main(int argc, char** argv) {
  double delay_ms = 0.0;
  if (argc > 1) {
    delay_ms = std::atof(argv[1]);
  }

  loadgauge::BridgeFrame frame;
  while (loadgauge::ReadFrame(STDIN_FILENO, &frame)) {
    if (frame.query_id == loadgauge::kFlushQueryId) {
      loadgauge::WriteFrame(STDOUT_FILENO, loadgauge::kFlushQueryId, {});
      continue;
    }
    if (delay_ms > 0.0) {
      std::this_thread::sleep_for(
          std::chrono::duration<double, std::milli>(delay_ms));
    }
    std::vector<uint64_t> digests;
    digests.reserve(frame.words.size());
    for (uint64_t index : frame.words) {
      digests.push_back(loadgauge::ReferencePayloadDigest(index));
    }
    loadgauge::WriteFrame(STDOUT_FILENO, frame.query_id, digests);
  }
  return 0;
}
