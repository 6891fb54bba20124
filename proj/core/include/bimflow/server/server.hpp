// Copyright 2026 The bimflow Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <memory>

#include "bimflow/orchestrator/config.hpp"
#include "bimflow/orchestrator/engine.hpp"

namespace bimflow::server {

/// HTTP and WebSocket front end of an engine on a single port.
///
/// HTTP:
///   POST /sessions                       -> {"session_id"}
///   POST /sessions/{id}/audio            multipart: "audio" file, optional
///                                        "submit" field ("false" returns the
///                                        transcript with an audio_ref only)
///   GET  /sessions/{id}/project          project document
///   GET  /sessions/{id}/trace/{turn}     pipeline trace
///   GET  /sessions/{id}/history          dialogue turns
///   GET  /health
/// WebSocket /sessions/{id}/ws:
///   client: {"type":"utterance","text"} | {"type":"answer","text"} |
///           {"type":"upload_audio_ref","audio_ref"}
///   server: session events as {"seq","type","session_id","turn","data"},
///           and {"type":"error","code","message"} for rejected messages.
class Server {
 public:
  Server(std::shared_ptr<orchestrator::Engine> engine, orchestrator::ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts serving on background threads. Port 0 picks a free port.
  void start();
  /// Stops accepting, closes connections and joins all threads.
  void stop();
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();
  std::uint16_t port() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace bimflow::server
