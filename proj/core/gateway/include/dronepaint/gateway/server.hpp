#pragma once

#include "dronepaint/gateway/session.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace dronepaint::gateway {

struct ServerOptions {
    std::string bind = "127.0.0.1";
    std::uint16_t port = 8765;        // WebSocket, 0 picks a free port
    std::uint16_t ndjson_port = 8766; // plain TCP, newline-delimited JSON; 0 picks a free port
    double broadcast_hz = 30.0;
    SessionConfig defaults;
    std::shared_ptr<const gesture::GestureModel> model;
};

// WebSocket endpoint `/session` (`?id=` resumes) and an NDJSON TCP port,
// served from one event loop: messages, ticks and broadcasts never overlap.
// A connection binds to a session on its first message: `session` with an id
// resumes, `config` opens one with overrides, anything else opens one with
// defaults and is then handled.
class Server {
public:
    explicit Server(ServerOptions options);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    std::uint16_t ws_port() const;
    std::uint16_t ndjson_port() const;

    // Blocks until stop() is called.
    void run();
    // Safe from any thread.
    void stop();

    struct Impl;

private:
    std::unique_ptr<Impl> impl_;
};

} // namespace dronepaint::gateway
