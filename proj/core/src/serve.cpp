#include "cartogan/serve.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

#include <httplib.h>

#include "cartogan/manifest.hpp"

namespace cartogan::pipeline {

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("serve: cannot open " + path.string());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

const char* content_type_for(const std::string& ext) {
    if (ext == "png") return "image/png";
    return "image/x-portable-pixmap";
}

} // namespace

struct TileServer::Impl {
    httplib::Server server;
    std::thread worker;
    int port = 0;
    std::map<std::string, std::filesystem::path> routes; // "z/x/y.ext" -> file

    ~Impl() { shutdown(); }

    void shutdown() {
        if (server.is_running()) server.stop();
        if (worker.joinable()) worker.join();
    }
};

TileServer::TileServer(const std::filesystem::path& root, int port)
    : impl_(std::make_unique<Impl>()) {
    DatasetManifest manifest = load_manifest(root, false);
    for (const auto& e : manifest.tiles) impl_->routes[e.path] = root / e.path;
    std::string manifest_body = slurp(root / "manifest.json");

    Impl* impl = impl_.get();
    impl->server.Get("/manifest.json", [manifest_body](const httplib::Request&,
                                                       httplib::Response& res) {
        res.set_content(manifest_body, "application/json");
    });
    impl->server.Get(R"(/tiles/(\d+)/(\d+)/(\d+)\.(ppm|png))",
                     [impl](const httplib::Request& req, httplib::Response& res) {
                         std::string key = req.matches[1].str() + "/" + req.matches[2].str() +
                                           "/" + req.matches[3].str() + "." +
                                           req.matches[4].str();
                         auto it = impl->routes.find(key);
                         if (it == impl->routes.end()) {
                             res.status = 404;
                             res.set_content("tile not found\n", "text/plain");
                             return;
                         }
                         res.set_content(slurp(it->second), content_type_for(req.matches[4].str()));
                     });

    if (port == 0) {
        impl->port = impl->server.bind_to_any_port("0.0.0.0");
        if (impl->port <= 0) throw std::runtime_error("serve: cannot bind an ephemeral port");
    } else {
        if (!impl->server.bind_to_port("0.0.0.0", port))
            throw std::runtime_error("serve: cannot bind port " + std::to_string(port) +
                                     " (in use?)");
        impl->port = port;
    }
    impl->worker = std::thread([impl] { impl->server.listen_after_bind(); });
    impl->server.wait_until_ready();
}

TileServer::~TileServer() = default;
TileServer::TileServer(TileServer&&) noexcept = default;
TileServer& TileServer::operator=(TileServer&&) noexcept = default;

int TileServer::port() const { return impl_->port; }

void TileServer::stop() { impl_->shutdown(); }

void cmd_serve(const std::filesystem::path& root, int port) {
    TileServer server(root, port);
    std::printf("serve: http://127.0.0.1:%d/tiles/<z>/<x>/<y>.<ext> (ctrl-c to stop)\n",
                server.port());
    std::fflush(stdout);
    // Block until the process is interrupted.
    while (true) std::this_thread::sleep_for(std::chrono::hours(24));
}

} // namespace cartogan::pipeline
