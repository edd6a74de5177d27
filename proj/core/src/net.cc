#include "pds/net.h"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <deque>
#include <optional>
#include <thread>

#include "pds/errors.h"

namespace pds {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

constexpr std::size_t kMaxLine = 64 * 1024;

class Connection;

// Hands relay frames back to the connection's event loop.
class LoopSink : public FrameSink {
 public:
  LoopSink(asio::io_context &ioc, std::weak_ptr<Connection> conn) : ioc_(ioc), conn_(std::move(conn)) {}
  void send(const std::string &frame) override;

 private:
  asio::io_context &ioc_;
  std::weak_ptr<Connection> conn_;
};

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(asio::io_context &ioc, tcp::socket socket, Relay &relay)
      : ioc_(ioc), socket_(std::move(socket)), relay_(relay) {}

  void start() { sniff(); }

  void queue(std::string frame) {
    if (closed_) return;
    if (!ws_) frame += '\n';
    outbox_.push_back(std::move(frame));
    if (outbox_.size() == 1) write_next();
  }

 private:
  // Reads until the first three bytes decide between WebSocket and raw lines.
  void sniff() {
    std::string_view seen(static_cast<const char *>(buf_.data().data()), buf_.size());
    bool maybe_get = std::string_view("GET").substr(0, std::min<std::size_t>(seen.size(), 3)) ==
                     seen.substr(0, std::min<std::size_t>(seen.size(), 3));
    if (seen.size() >= 3 || !maybe_get) {
      if (seen.starts_with("GET")) {
        upgrade();
      } else {
        attach();
        drain_lines();
        read_raw();
      }
      return;
    }
    auto self = shared_from_this();
    socket_.async_read_some(buf_.prepare(512), [self](beast::error_code ec, std::size_t n) {
      if (ec) return self->close();
      self->buf_.commit(n);
      self->sniff();
    });
  }

  void upgrade() {
    auto self = shared_from_this();
    http::async_read(socket_, buf_, request_, [self](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      self->ws_.emplace(std::move(self->socket_));
      self->ws_->async_accept(self->request_, [self](beast::error_code ec2) {
        if (ec2) return self->close();
        self->buf_.consume(self->buf_.size());
        self->attach();
        self->read_ws();
      });
    });
  }

  void attach() {
    id_ = relay_.connect(std::make_shared<LoopSink>(ioc_, weak_from_this()));
  }

  void read_raw() {
    auto self = shared_from_this();
    socket_.async_read_some(buf_.prepare(4096), [self](beast::error_code ec, std::size_t n) {
      if (ec) return self->close();
      self->buf_.commit(n);
      self->drain_lines();
      if (self->buf_.size() > kMaxLine) return self->close();
      self->read_raw();
    });
  }

  void drain_lines() {
    for (;;) {
      std::string_view data(static_cast<const char *>(buf_.data().data()), buf_.size());
      auto nl = data.find('\n');
      if (nl == std::string_view::npos) return;
      std::string line(data.substr(0, nl));
      buf_.consume(nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) relay_.handle_frame(*id_, line);
    }
  }

  void read_ws() {
    auto self = shared_from_this();
    ws_->async_read(buf_, [self](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      std::string text = beast::buffers_to_string(self->buf_.data());
      self->buf_.consume(self->buf_.size());
      std::size_t start = 0;
      while (start <= text.size()) {
        auto nl = text.find('\n', start);
        std::string line = text.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
        if (!line.empty()) self->relay_.handle_frame(*self->id_, line);
        if (nl == std::string::npos) break;
        start = nl + 1;
      }
      self->read_ws();
    });
  }

  void write_next() {
    auto self = shared_from_this();
    auto done = [self](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      self->outbox_.pop_front();
      if (!self->outbox_.empty()) self->write_next();
    };
    if (ws_) {
      ws_->text(true);
      ws_->async_write(asio::buffer(outbox_.front()), done);
    } else {
      asio::async_write(socket_, asio::buffer(outbox_.front()), done);
    }
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    if (id_) relay_.disconnect(*id_);
    beast::error_code ignored;
    if (ws_) {
      beast::get_lowest_layer(*ws_).close(ignored);
    } else {
      socket_.close(ignored);
    }
  }

  asio::io_context &ioc_;
  tcp::socket socket_;
  Relay &relay_;
  beast::flat_buffer buf_;
  http::request<http::string_body> request_;
  std::optional<websocket::stream<tcp::socket>> ws_;
  std::optional<Relay::ConnectionId> id_;
  std::deque<std::string> outbox_;
  bool closed_ = false;
};

void LoopSink::send(const std::string &frame) {
  asio::post(ioc_, [conn = conn_, frame] {
    if (auto c = conn.lock()) c->queue(frame);
  });
}

}  // namespace

class RelayServer::Impl {
 public:
  Impl(Relay &relay, std::uint16_t port, const std::string &address) : relay_(relay), acceptor_(ioc_) {
    beast::error_code ec;
    auto addr = asio::ip::make_address(address, ec);
    if (ec) throw ValidationError("bad listen address '" + address + "'");
    tcp::endpoint ep(addr, port);
    acceptor_.open(ep.protocol(), ec);
    if (!ec) acceptor_.set_option(asio::socket_base::reuse_address(true), ec);
    if (!ec) acceptor_.bind(ep, ec);
    if (!ec) acceptor_.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) throw IoError("cannot listen on " + address + ":" + std::to_string(port) + ": " + ec.message());
    accept();
  }

  ~Impl() { stop(); }

  std::uint16_t port() const { return acceptor_.local_endpoint().port(); }

  void run() { ioc_.run(); }

  void start() {
    thread_ = std::thread([this] { ioc_.run(); });
  }

  void stop() {
    ioc_.stop();
    if (thread_.joinable()) thread_.join();
  }

 private:
  void accept() {
    acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec == asio::error::operation_aborted) return;
      } else {
        socket.set_option(tcp::no_delay(true), ec);
        std::make_shared<Connection>(ioc_, std::move(socket), relay_)->start();
      }
      accept();
    });
  }

  Relay &relay_;
  asio::io_context ioc_;
  tcp::acceptor acceptor_;
  std::thread thread_;
};

RelayServer::RelayServer(Relay &relay, std::uint16_t port, const std::string &address)
    : impl_(std::make_unique<Impl>(relay, port, address)) {}

RelayServer::~RelayServer() = default;

std::uint16_t RelayServer::port() const { return impl_->port(); }
void RelayServer::run() { impl_->run(); }
void RelayServer::start() { impl_->start(); }
void RelayServer::stop() { impl_->stop(); }

}  // namespace pds
