#include "pds/net.h"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <gtest/gtest.h>

#include "test_support.h"

namespace pds {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using asio::ip::tcp;
using nlohmann::json;
using testing::TempDir;

class NetTest : public ::testing::Test {
 protected:
  void SetUp() override {
    pipe_ = Pipeline::open(testing::data_dir(), dir_.path());
    relay_ = std::make_unique<Relay>(pipe_->monitor());
    server_ = std::make_unique<RelayServer>(*relay_, 0, "127.0.0.1");
    server_->start();
  }
  void TearDown() override { server_->stop(); }

  TempDir dir_;
  std::unique_ptr<Pipeline> pipe_;
  std::unique_ptr<Relay> relay_;
  std::unique_ptr<RelayServer> server_;
};

// Blocking newline-delimited JSON client.
class LineClient {
 public:
  explicit LineClient(std::uint16_t port) : socket_(io_) {
    socket_.connect({asio::ip::make_address("127.0.0.1"), port});
  }
  void send(const json &frame) { asio::write(socket_, asio::buffer(frame.dump() + "\n")); }
  json read() {
    std::size_t n = asio::read_until(socket_, buf_, '\n');
    std::string line(asio::buffers_begin(buf_.data()), asio::buffers_begin(buf_.data()) + static_cast<long>(n));
    buf_.consume(n);
    return json::parse(line);
  }

 private:
  asio::io_context io_;
  tcp::socket socket_;
  asio::streambuf buf_;
};

class WsClient {
 public:
  explicit WsClient(std::uint16_t port) : ws_(io_) {
    beast::get_lowest_layer(ws_).connect({asio::ip::make_address("127.0.0.1"), port});
    ws_.handshake("127.0.0.1:" + std::to_string(port), "/");
    ws_.text(true);
  }
  void send(const json &frame) { ws_.write(asio::buffer(frame.dump())); }
  json read() {
    beast::flat_buffer buf;
    ws_.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  }

 private:
  asio::io_context io_;
  websocket::stream<tcp::socket> ws_;
};

TEST_F(NetTest, LineProtocolEndToEnd) {
  LineClient a(server_->port());
  LineClient b(server_->port());
  a.send({{"type", "join"}, {"session", "s1"}, {"who", "alice"}});
  EXPECT_EQ(a.read()["type"], "joined");
  b.send({{"type", "join"}, {"session", "s1"}, {"who", "bob"}});
  EXPECT_EQ(b.read()["type"], "joined");
  a.send({{"type", "msg"}, {"text", "what is ur lucky no"}});
  EXPECT_EQ(a.read()["text"], "what is ur lucky no");
  auto msg = b.read();
  EXPECT_EQ(msg["type"], "msg");
  EXPECT_EQ(msg["who"], "alice");
  auto alert = b.read();
  EXPECT_EQ(alert["type"], "alert");
  EXPECT_EQ(alert["keyword"], "lucky no");
  EXPECT_EQ(alert["color"], "RED");
}

TEST_F(NetTest, WebSocketAndLineClientsShareASession) {
  WsClient a(server_->port());
  LineClient b(server_->port());
  a.send({{"type", "join"}, {"session", "mix"}, {"who", "alice"}});
  EXPECT_EQ(a.read()["type"], "joined");
  b.send({{"type", "join"}, {"session", "mix"}, {"who", "bob"}});
  EXPECT_EQ(b.read()["type"], "joined");
  b.send({{"type", "msg"}, {"text", "whats your password"}});
  EXPECT_EQ(b.read()["type"], "msg");
  EXPECT_EQ(a.read()["text"], "whats your password");
  auto alert = a.read();
  EXPECT_EQ(alert["type"], "alert");
  EXPECT_EQ(alert["keyword"], "password");
}

TEST_F(NetTest, BadFrameOverTheWire) {
  LineClient a(server_->port());
  a.send("nonsense");
  EXPECT_EQ(a.read()["code"], "BAD_FRAME");
  WsClient w(server_->port());
  w.send({{"type", "msg"}, {"text", "hi"}});
  EXPECT_EQ(w.read()["code"], "NO_SESSION");
}

}  // namespace
}  // namespace pds
