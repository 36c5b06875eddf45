#pragma once

// HTTP front end for the session service.
//
//   POST /api/sessions                 {personality, policy_id, seed} -> 201 session view + first_offer
//   GET  /api/sessions/{id}            session view
//   POST /api/sessions/{id}/decision   {action: accept|reject}
//   POST /api/sessions/{id}/affect     {frames: [{arousal, valence}]} -> {accepted}
//   POST /api/sessions/{id}/next       close the listening window early
//   GET  /api/sessions/{id}/stream     server-sent events (?since=SEQ or Last-Event-ID)
//   GET  /api/sessions/{id}/log        full event log as JSON
//   GET  /api/policies                 known policy ids

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "affnego/session.hpp"

namespace affnego {

class SessionServer {
 public:
  explicit SessionServer(SessionManager& manager);
  ~SessionServer();

  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  // Port 0 binds any free port. Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  // Serves until stop(); blocking.
  bool listen();
  // bind + listen on a background thread.
  int start(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace affnego
