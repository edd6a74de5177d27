#ifndef PDS_NET_H_
#define PDS_NET_H_

#include <cstdint>
#include <memory>
#include <string>

#include "pds/relay.h"

namespace pds {

// Serves the relay protocol on one TCP port. The first bytes of each
// connection select the transport: an HTTP "GET" upgrades to WebSocket (one
// frame per text message), anything else is raw newline-delimited JSON.
class RelayServer {
 public:
  RelayServer(Relay &relay, std::uint16_t port, const std::string &address = "0.0.0.0");
  ~RelayServer();

  RelayServer(const RelayServer &) = delete;
  RelayServer &operator=(const RelayServer &) = delete;

  // Bound port (useful when constructed with port 0).
  std::uint16_t port() const;

  // Blocks until stop() is called.
  void run();
  // Runs the event loop on a background thread.
  void start();
  void stop();

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pds

#endif  // PDS_NET_H_
