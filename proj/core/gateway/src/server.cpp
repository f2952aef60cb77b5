#include "dronepaint/gateway/server.hpp"

#include "dronepaint/error.hpp"

#include <boost/asio.hpp>
#include <boost/asio/co_spawn.hpp>
#include <boost/asio/detached.hpp>
#include <boost/asio/use_awaitable.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <deque>
#include <map>
#include <string_view>

namespace dronepaint::gateway {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using asio::awaitable;
using asio::use_awaitable;

namespace {

class Connection : public std::enable_shared_from_this<Connection> {
public:
    virtual ~Connection() = default;
    virtual void send(std::string text) = 0;
    virtual void close() = 0;

    std::string session_id;
};

using ConnectionPtr = std::shared_ptr<Connection>;

std::string query_param(std::string_view target, std::string_view key) {
    const auto q = target.find('?');
    if (q == std::string_view::npos) {
        return {};
    }
    std::string_view rest = target.substr(q + 1);
    while (!rest.empty()) {
        const auto amp = rest.find('&');
        const std::string_view pair = rest.substr(0, amp);
        const auto eq = pair.find('=');
        if (pair.substr(0, eq) == key && eq != std::string_view::npos) {
            return std::string(pair.substr(eq + 1));
        }
        if (amp == std::string_view::npos) {
            break;
        }
        rest = rest.substr(amp + 1);
    }
    return {};
}

} // namespace

struct Server::Impl {
    ServerOptions options;
    asio::io_context io{1};
    tcp::acceptor ws_acceptor{io};
    tcp::acceptor nd_acceptor{io};
    asio::steady_timer ticker{io};
    std::map<std::string, std::unique_ptr<Session>> sessions;
    std::map<std::string, std::vector<std::weak_ptr<Connection>>> subscribers;
    std::uint64_t next_id = 1;

    explicit Impl(ServerOptions opts) : options(std::move(opts)) {
        const auto addr = asio::ip::make_address(options.bind);
        open(ws_acceptor, tcp::endpoint(addr, options.port));
        open(nd_acceptor, tcp::endpoint(addr, options.ndjson_port));
    }

    static void open(tcp::acceptor& acceptor, const tcp::endpoint& ep) {
        acceptor.open(ep.protocol());
        acceptor.set_option(asio::socket_base::reuse_address(true));
        acceptor.bind(ep);
        acceptor.listen();
    }

    void attach(const ConnectionPtr& conn, const std::string& id) {
        conn->session_id = id;
        subscribers[id].push_back(conn);
        conn->send(nlohmann::json{{"type", "session"}, {"id", id}}.dump());
    }

    std::string open_session(const nlohmann::json& overrides) {
        SessionConfig config = apply_overrides(overrides, options.defaults);
        const std::string id = "s" + std::to_string(next_id++);
        sessions.emplace(id, std::make_unique<Session>(id, std::move(config), options.model));
        return id;
    }

    void on_message(const ConnectionPtr& conn, const std::string& line) {
        if (conn->session_id.empty()) {
            nlohmann::json msg = nlohmann::json::parse(line, nullptr, false);
            const std::string type = msg.is_object() && msg.contains("type") && msg["type"].is_string()
                                         ? msg["type"].get<std::string>()
                                         : std::string{};
            try {
                if (type == "session" && msg.contains("id")) {
                    const std::string id = msg["id"].is_string() ? msg["id"].get<std::string>() : std::string{};
                    if (!sessions.contains(id)) {
                        conn->send(error_message("unknown session id '" + id + "'").dump());
                    } else {
                        attach(conn, id);
                    }
                    return;
                }
                if (type == "config") {
                    msg.erase("type");
                    attach(conn, open_session(msg));
                    return;
                }
                attach(conn, open_session(nlohmann::json::object()));
            } catch (const Error& e) {
                conn->send(error_message(e.what()).dump());
                return;
            }
        }
        auto it = sessions.find(conn->session_id);
        if (it == sessions.end()) {
            conn->send(error_message("session closed").dump());
            return;
        }
        for (const auto& reply : it->second->handle_message(line)) {
            conn->send(reply.dump());
        }
    }

    void broadcast(const std::string& id, const std::string& text) {
        auto& subs = subscribers[id];
        std::erase_if(subs, [](const auto& w) { return w.expired(); });
        for (const auto& w : subs) {
            if (auto c = w.lock()) {
                c->send(text);
            }
        }
    }

    awaitable<void> tick_loop() {
        const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(1.0 / options.broadcast_hz));
        const double dt = 1.0 / options.broadcast_hz;
        auto next = std::chrono::steady_clock::now();
        for (;;) {
            next += period;
            ticker.expires_at(next);
            co_await ticker.async_wait(use_awaitable);
            for (auto& [id, session] : sessions) {
                for (const auto& msg : session->advance(dt)) {
                    broadcast(id, msg.dump());
                }
                broadcast(id, session->snapshot().dump());
            }
        }
    }

    awaitable<void> accept_ws();
    awaitable<void> accept_ndjson();
};

namespace {

class WsConnection : public Connection {
public:
    WsConnection(tcp::socket socket, Server::Impl& server) : ws_(std::move(socket)), server_(server) {}

    void send(std::string text) override {
        outbox_.push_back(std::move(text));
        if (outbox_.size() == 1) {
            write_next();
        }
    }

    void close() override {
        beast::error_code ec;
        ws_.next_layer().close(ec);
    }

    // Static with the owner as a by-value parameter so the coroutine frame keeps it alive.
    static awaitable<void> run(std::shared_ptr<WsConnection> self);

private:
    void write_next() {
        ws_.text(true);
        ws_.async_write(asio::buffer(outbox_.front()),
                        [self = shared_from_this(), this](beast::error_code ec, std::size_t) {
                            if (ec) {
                                outbox_.clear();
                                return;
                            }
                            outbox_.pop_front();
                            if (!outbox_.empty()) {
                                write_next();
                            }
                        });
    }

    websocket::stream<tcp::socket> ws_;
    Server::Impl& server_;
    std::deque<std::string> outbox_;
};

class NdjsonConnection : public Connection {
public:
    NdjsonConnection(tcp::socket socket, Server::Impl& server) : socket_(std::move(socket)), server_(server) {}

    void send(std::string text) override {
        text.push_back('\n');
        outbox_.push_back(std::move(text));
        if (outbox_.size() == 1) {
            write_next();
        }
    }

    void close() override {
        beast::error_code ec;
        socket_.close(ec);
    }

    static awaitable<void> run(std::shared_ptr<NdjsonConnection> self);

private:
    void write_next() {
        asio::async_write(socket_, asio::buffer(outbox_.front()),
                          [self = shared_from_this(), this](boost::system::error_code ec, std::size_t) {
                              if (ec) {
                                  outbox_.clear();
                                  return;
                              }
                              outbox_.pop_front();
                              if (!outbox_.empty()) {
                                  write_next();
                              }
                          });
    }

    tcp::socket socket_;
    Server::Impl& server_;
    std::deque<std::string> outbox_;
};

void handle_lines(Server::Impl& server, const ConnectionPtr& self, std::string_view text) {
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (!line.empty()) {
            server.on_message(self, std::string(line));
        }
        if (nl == std::string_view::npos) {
            break;
        }
        text.remove_prefix(nl + 1);
    }
}

awaitable<void> WsConnection::run(std::shared_ptr<WsConnection> self) {
    try {
        beast::flat_buffer buffer;
        http::request<http::string_body> req;
        co_await http::async_read(self->ws_.next_layer(), buffer, req, use_awaitable);
        const std::string_view target(req.target().data(), req.target().size());
        if (!websocket::is_upgrade(req) || target.substr(0, target.find('?')) != "/session") {
            http::response<http::string_body> res{http::status::not_found, req.version()};
            res.set(http::field::content_type, "text/plain");
            res.body() = "websocket endpoint is /session\n";
            res.prepare_payload();
            co_await http::async_write(self->ws_.next_layer(), res, use_awaitable);
            self->close();
            co_return;
        }
        co_await self->ws_.async_accept(req, use_awaitable);
        const std::string resume = query_param(target, "id");
        if (!resume.empty()) {
            if (self->server_.sessions.contains(resume)) {
                self->server_.attach(self, resume);
            } else {
                self->send(error_message("unknown session id '" + resume + "'").dump());
            }
        }
        for (;;) {
            beast::flat_buffer frame;
            co_await self->ws_.async_read(frame, use_awaitable);
            handle_lines(self->server_, self, beast::buffers_to_string(frame.data()));
        }
    } catch (const std::exception&) {
        // Disconnect; the session stays open for resumption.
    }
}

awaitable<void> NdjsonConnection::run(std::shared_ptr<NdjsonConnection> self) {
    try {
        std::string buffer;
        for (;;) {
            const std::size_t n = co_await asio::async_read_until(self->socket_, asio::dynamic_buffer(buffer), '\n',
                                                                  use_awaitable);
            const std::string line = buffer.substr(0, n);
            buffer.erase(0, n);
            handle_lines(self->server_, self, line);
        }
    } catch (const std::exception&) {
    }
}

} // namespace

awaitable<void> Server::Impl::accept_ws() {
    for (;;) {
        tcp::socket socket = co_await ws_acceptor.async_accept(use_awaitable);
        auto conn = std::make_shared<WsConnection>(std::move(socket), *this);
        asio::co_spawn(io, std::decay_t<decltype(*conn)>::run(conn), asio::detached);
    }
}

awaitable<void> Server::Impl::accept_ndjson() {
    for (;;) {
        tcp::socket socket = co_await nd_acceptor.async_accept(use_awaitable);
        auto conn = std::make_shared<NdjsonConnection>(std::move(socket), *this);
        asio::co_spawn(io, std::decay_t<decltype(*conn)>::run(conn), asio::detached);
    }
}

Server::Server(ServerOptions options) {
    if (!(options.broadcast_hz > 0.0)) {
        fail(ErrorCode::ConfigError, "broadcast rate must be positive");
    }
    try {
        impl_ = std::make_unique<Impl>(std::move(options));
    } catch (const boost::system::system_error& e) {
        fail(ErrorCode::IoError, std::string("cannot listen: ") + e.what());
    }
}

Server::~Server() = default;

std::uint16_t Server::ws_port() const {
    return impl_->ws_acceptor.local_endpoint().port();
}

std::uint16_t Server::ndjson_port() const {
    return impl_->nd_acceptor.local_endpoint().port();
}

void Server::run() {
    asio::co_spawn(impl_->io, impl_->accept_ws(), asio::detached);
    asio::co_spawn(impl_->io, impl_->accept_ndjson(), asio::detached);
    asio::co_spawn(impl_->io, impl_->tick_loop(), asio::detached);
    impl_->io.run();
}

void Server::stop() {
    impl_->io.stop();
}

} // namespace dronepaint::gateway
