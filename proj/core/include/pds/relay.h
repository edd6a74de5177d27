#ifndef PDS_RELAY_H_
#define PDS_RELAY_H_

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pds/monitor.h"

namespace pds {

// Receives serialized frames (one JSON object, no trailing newline) for a
// single client connection. Implementations must not block.
class FrameSink {
 public:
  virtual ~FrameSink() = default;
  virtual void send(const std::string &frame) = 0;
};

// Wire protocol (newline-delimited JSON frames):
//   client -> server  {type:"join", session, who}   {type:"msg", text}
//   server -> client  {type:"joined", session, who}
//                     {type:"msg", who, seq, text[, degraded]}
//                     {type:"alert", seq, keyword, label, color}
//                     {type:"error", code}
//
// Sessions hold exactly two chatters. Every message is echoed to its sender
// and relayed to the counterpart before any alert frames for it; alerts go to
// the counterpart only. Frames for an absent counterpart are buffered until
// that chatter (re)joins or the session closes.
class Relay {
 public:
  using ConnectionId = std::uint64_t;

  explicit Relay(Monitor &monitor);

  ConnectionId connect(std::shared_ptr<FrameSink> sink);
  void disconnect(ConnectionId conn);

  // Parses and dispatches one client frame.
  void handle_frame(ConnectionId conn, std::string_view line);

  void join(ConnectionId conn, const std::string &session_id, const std::string &who);

  // Assigns the next seq, runs detection, relays the text, pushes alerts.
  void handle_client_message(ConnectionId conn, const std::string &text);

  // Drops the session and its buffered frames.
  void close_session(const std::string &session_id);

  std::size_t buffered_frames(const std::string &session_id, const std::string &who) const;

 private:
  struct Participant {
    std::string who;
    std::optional<ConnectionId> conn;
    std::deque<std::string> pending;
  };
  struct Session {
    std::string id;
    std::vector<Participant> participants;
    std::deque<std::string> unclaimed;  // for a second chatter not yet joined
    std::int64_t next_seq = 1;
  };
  struct Connection {
    std::shared_ptr<FrameSink> sink;
    std::optional<std::string> session_id;
    std::string who;
  };

  void send_error(ConnectionId conn, std::string_view code);
  void deliver(Session &session, const std::string &who, const std::string &frame);
  void deliver_to_other(Session &session, const std::string &sender, const std::string &frame);
  Participant *find(Session &session, const std::string &who);

  Monitor *monitor_;
  mutable std::recursive_mutex mu_;
  ConnectionId next_conn_ = 1;
  std::map<ConnectionId, Connection> connections_;
  std::map<std::string, Session> sessions_;
};

nlohmann::json msg_frame(const std::string &who, std::int64_t seq, const std::string &text, bool degraded);
nlohmann::json alert_frame(const Alert &alert);
nlohmann::json error_frame(std::string_view code);

}  // namespace pds

#endif  // PDS_RELAY_H_
