#include "commands.hpp"

#include "dronepaint/error.hpp"
#include "dronepaint/gesture/classifier.hpp"
#include "dronepaint/util/text_io.hpp"

#ifdef DRONEPAINT_HAVE_GATEWAY
#include "dronepaint/gateway/server.hpp"
#endif

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <iostream>

namespace dronepaint::cli {

namespace {

namespace fs = std::filesystem;

std::uint16_t parse_port(const char* text) {
    char* end = nullptr;
    const long v = std::strtol(text, &end, 10);
    if (end == text || *end != '\0' || v < 0 || v > 65535) {
        fail(ErrorCode::ConfigError, std::string("invalid port '") + text + "'");
    }
    return static_cast<std::uint16_t>(v);
}

#ifdef DRONEPAINT_HAVE_GATEWAY
gateway::Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) {
        g_server->stop();
    }
}
#endif

} // namespace

Action register_serve(CLI::App& app) {
    auto* cmd = app.add_subcommand("serve", "Run the live session gateway (WebSocket /session + NDJSON TCP)");
    struct Opts {
        std::string bind = "127.0.0.1";
        std::uint16_t port = 8765;
        std::optional<std::uint16_t> ndjson_port;
        std::string model;
        std::string out = "out";
        std::string config;
        double hz = 30.0;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--bind", o->bind, "Bind address")->capture_default_str();
    cmd->add_option("--port", o->port, "WebSocket port (DRONEPAINT_PORT overrides)")->capture_default_str();
    cmd->add_option("--ndjson-port", o->ndjson_port, "NDJSON TCP port (default: port + 1)");
    cmd->add_option("--model", o->model, "Gesture model (default: <out>/model.json when present)");
    cmd->add_option("--out", o->out, "Directory holding model.json")->capture_default_str();
    cmd->add_option("--config", o->config, "Session defaults (JSON overrides)")->check(CLI::ExistingFile);
    cmd->add_option("--hz", o->hz, "Broadcast rate")->capture_default_str();
    return [o]() -> int {
#ifdef DRONEPAINT_HAVE_GATEWAY
        gateway::ServerOptions opts;
        opts.bind = o->bind;
        opts.port = o->port;
        if (const char* env = std::getenv("DRONEPAINT_PORT"); env && *env) {
            opts.port = parse_port(env);
        }
        opts.ndjson_port = o->ndjson_port.value_or(opts.port == 0 ? 0 : static_cast<std::uint16_t>(opts.port + 1));
        opts.broadcast_hz = o->hz;
        if (!o->config.empty()) {
            opts.defaults = gateway::apply_overrides(read_json(o->config));
        }
        const fs::path model_path = o->model.empty() ? fs::path(o->out) / "model.json" : fs::path(o->model);
        if (!o->model.empty() || fs::exists(model_path)) {
            opts.model = std::make_shared<const gesture::GestureModel>(
                gesture::parse_model_json(util::read_file(model_path)));
        } else {
            std::cerr << "note: no gesture model found; hand_frame messages will be rejected\n";
        }
        gateway::Server server(std::move(opts));
        g_server = &server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::printf("websocket: ws://%s:%u/session\nndjson: %s:%u\n", o->bind.c_str(), server.ws_port(),
                    o->bind.c_str(), server.ndjson_port());
        std::fflush(stdout);
        server.run();
        g_server = nullptr;
        return 0;
#else
        (void)parse_port;
        fail(ErrorCode::ConfigError, "this build has no gateway");
#endif
    };
}

} // namespace dronepaint::cli
