#include "pds/relay.h"

#include <chrono>

#include "pds/errors.h"

namespace pds {
namespace {

using nlohmann::json;

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

json msg_frame(const std::string &who, std::int64_t seq, const std::string &text, bool degraded) {
  json f{{"type", "msg"}, {"who", who}, {"seq", seq}, {"text", text}};
  if (degraded) f["degraded"] = true;
  return f;
}

json alert_frame(const Alert &alert) {
  return json{{"type", "alert"},
              {"seq", alert.message_ref.seq},
              {"keyword", alert.keyword},
              {"label", std::string(to_string(alert.label))},
              {"color", std::string(to_string(alert.color))}};
}

json error_frame(std::string_view code) { return json{{"type", "error"}, {"code", std::string(code)}}; }

Relay::Relay(Monitor &monitor) : monitor_(&monitor) {}

Relay::ConnectionId Relay::connect(std::shared_ptr<FrameSink> sink) {
  if (!sink) throw ContractError("connect needs a sink");
  std::lock_guard lock(mu_);
  ConnectionId id = next_conn_++;
  connections_.emplace(id, Connection{std::move(sink), std::nullopt, {}});
  return id;
}

void Relay::disconnect(ConnectionId conn) {
  std::lock_guard lock(mu_);
  auto it = connections_.find(conn);
  if (it == connections_.end()) return;
  if (it->second.session_id) {
    auto s = sessions_.find(*it->second.session_id);
    if (s != sessions_.end()) {
      if (Participant *p = find(s->second, it->second.who); p != nullptr && p->conn == conn) p->conn.reset();
    }
  }
  connections_.erase(it);
}

void Relay::send_error(ConnectionId conn, std::string_view code) {
  auto it = connections_.find(conn);
  if (it != connections_.end()) it->second.sink->send(error_frame(code).dump());
}

Relay::Participant *Relay::find(Session &session, const std::string &who) {
  for (auto &p : session.participants) {
    if (p.who == who) return &p;
  }
  return nullptr;
}

void Relay::deliver(Session &session, const std::string &who, const std::string &frame) {
  Participant *p = find(session, who);
  if (p == nullptr) return;
  if (p->conn) {
    auto it = connections_.find(*p->conn);
    if (it != connections_.end()) {
      it->second.sink->send(frame);
      return;
    }
    p->conn.reset();
  }
  p->pending.push_back(frame);
}

void Relay::deliver_to_other(Session &session, const std::string &sender, const std::string &frame) {
  for (auto &p : session.participants) {
    if (p.who != sender) {
      deliver(session, p.who, frame);
      return;
    }
  }
  session.unclaimed.push_back(frame);
}

void Relay::handle_frame(ConnectionId conn, std::string_view line) {
  std::lock_guard lock(mu_);
  if (!connections_.contains(conn)) return;
  json f = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (f.is_discarded() || !f.is_object() || !f.contains("type") || !f["type"].is_string()) {
    send_error(conn, "BAD_FRAME");
    return;
  }
  const std::string type = f["type"].get<std::string>();
  if (type == "join") {
    if (!f.contains("session") || !f["session"].is_string() || !f.contains("who") || !f["who"].is_string()) {
      send_error(conn, "BAD_JOIN");
      return;
    }
    join(conn, f["session"].get<std::string>(), f["who"].get<std::string>());
  } else if (type == "msg") {
    if (!f.contains("text") || !f["text"].is_string()) {
      send_error(conn, "BAD_FRAME");
      return;
    }
    handle_client_message(conn, f["text"].get<std::string>());
  } else {
    send_error(conn, "BAD_FRAME");
  }
}

void Relay::join(ConnectionId conn, const std::string &session_id, const std::string &who) {
  std::lock_guard lock(mu_);
  auto cit = connections_.find(conn);
  if (cit == connections_.end()) return;
  if (session_id.empty() || who.empty() || cit->second.session_id) {
    send_error(conn, "BAD_JOIN");
    return;
  }
  auto [sit, created] = sessions_.try_emplace(session_id);
  Session &s = sit->second;
  if (created) s.id = session_id;
  Participant *p = find(s, who);
  if (p != nullptr) {
    if (p->conn && connections_.contains(*p->conn)) {
      send_error(conn, "BAD_JOIN");  // that chatter is already connected
      return;
    }
  } else {
    if (s.participants.size() >= 2) {
      send_error(conn, "SESSION_FULL");
      return;
    }
    s.participants.push_back(Participant{who, std::nullopt, {}});
    p = &s.participants.back();
    if (s.participants.size() == 2) {
      p->pending = std::move(s.unclaimed);
      s.unclaimed.clear();
      monitor_->set_participants(session_id, s.participants[0].who, s.participants[1].who);
    }
  }
  p->conn = conn;
  cit->second.session_id = session_id;
  cit->second.who = who;
  auto &sink = cit->second.sink;
  sink->send(json{{"type", "joined"}, {"session", session_id}, {"who", who}}.dump());
  while (!p->pending.empty()) {
    sink->send(p->pending.front());
    p->pending.pop_front();
  }
}

void Relay::handle_client_message(ConnectionId conn, const std::string &text) {
  std::lock_guard lock(mu_);
  auto cit = connections_.find(conn);
  if (cit == connections_.end()) return;
  if (!cit->second.session_id) {
    send_error(conn, "NO_SESSION");
    return;
  }
  auto sit = sessions_.find(*cit->second.session_id);
  if (sit == sessions_.end()) {
    send_error(conn, "NO_SESSION");
    return;
  }
  if (blank(text)) {
    send_error(conn, "EMPTY_TEXT");
    return;
  }
  Session &s = sit->second;
  const std::string who = cit->second.who;
  ChatMessage msg{s.id, s.next_seq++, who, text, now_ms()};

  Monitor::Outcome outcome;
  try {
    outcome = monitor_->process_message(msg);
  } catch (const std::exception &) {
    // Detection must never block the chat itself.
    outcome.result.degraded = true;
  }
  const std::string frame = msg_frame(who, msg.seq, text, outcome.result.degraded).dump();
  deliver(s, who, frame);
  deliver_to_other(s, who, frame);
  for (const auto &alert : outcome.alerts) deliver_to_other(s, who, alert_frame(alert).dump());
}

void Relay::close_session(const std::string &session_id) {
  std::lock_guard lock(mu_);
  for (auto &[id, c] : connections_) {
    if (c.session_id == session_id) {
      c.session_id.reset();
      c.who.clear();
    }
  }
  sessions_.erase(session_id);
}

std::size_t Relay::buffered_frames(const std::string &session_id, const std::string &who) const {
  std::lock_guard lock(mu_);
  auto sit = sessions_.find(session_id);
  if (sit == sessions_.end()) return 0;
  for (const auto &p : sit->second.participants) {
    if (p.who == who) return p.pending.size();
  }
  return sit->second.unclaimed.size();
}

}  // namespace pds
