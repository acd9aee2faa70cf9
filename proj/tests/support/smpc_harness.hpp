// Copyright 2026 The HFCF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runs one client/server session over an in-memory pipe with transcripts
// recorded on both ends.

#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "hfcf/smpc/session.hpp"

namespace hfcf::testing {

struct SessionRun {
  std::vector<smpc::Match> matches;
  std::vector<bytes::Buffer> server_received;
  std::vector<bytes::Buffer> client_received;
  std::exception_ptr server_error;
  std::exception_ptr client_error;
};

inline SessionRun run_session(std::span<const smpc::Candidate> candidates, std::vector<smpc::EnrolledShare> gallery,
                              std::uint64_t dealer_seed, std::uint64_t client_seed,
                              const std::function<void(smpc::SmpcClient&)>& prepare = {}) {
  const std::size_t dim = candidates.front().query.size();
  auto dealt = smpc::dealer_make_triples(candidates.size() + 1, dim, dealer_seed);
  smpc::TripleStore client_triples(std::move(dealt.client)), server_triples(std::move(dealt.server));
  smpc::SmpcServer server(std::move(gallery), server_triples);
  smpc::SmpcClient client(client_triples, RingRng(client_seed));

  auto channels = smpc::memory_channel_pair();
  smpc::Channel& client_end = channels.first;
  smpc::Channel& server_end = channels.second;
  client_end.set_recording(true);
  server_end.set_recording(true);
  SessionRun run;
  std::thread worker([&] {
    try {
      server.serve(server_end);
    } catch (...) {
      run.server_error = std::current_exception();
    }
  });
  try {
    if (prepare) prepare(client);
    run.matches = client.verify(client_end, candidates);
  } catch (...) {
    run.client_error = std::current_exception();
    client_end.close();
  }
  worker.join();
  run.server_received = server_end.received_transcript();
  run.client_received = client_end.received_transcript();
  return run;
}

}  // namespace hfcf::testing
