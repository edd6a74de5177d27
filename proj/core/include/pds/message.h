#ifndef PDS_MESSAGE_H_
#define PDS_MESSAGE_H_

#include <cstdint>
#include <compare>
#include <string>

namespace pds {

// One instant message as captured into the message store.
struct ChatMessage {
  std::string session_id;
  int64_t seq = 0;
  std::string sender;
  std::string text;
  int64_t timestamp_ms = 0;
};

// Identifies a message within its session.
struct MessageRef {
  std::string session_id;
  int64_t seq = 0;

  auto operator<=>(const MessageRef &) const = default;
};

inline MessageRef ref_of(const ChatMessage &msg) { return {msg.session_id, msg.seq}; }

}  // namespace pds

#endif  // PDS_MESSAGE_H_
