#ifndef CARTOGAN_SERVE_HPP
#define CARTOGAN_SERVE_HPP

#include <filesystem>
#include <memory>

namespace cartogan::pipeline {

// Read-only HTTP endpoint over one tileset:
//   GET /tiles/<z>/<x>/<y>.<ext>  tile bytes (404 when absent)
//   GET /manifest.json            the manifest
// Requires a valid manifest at the root; port 0 binds an ephemeral port.
class TileServer {
public:
    TileServer(const std::filesystem::path& root, int port);
    ~TileServer();
    TileServer(TileServer&&) noexcept;
    TileServer& operator=(TileServer&&) noexcept;

    int port() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Blocking variant used by the CLI.
void cmd_serve(const std::filesystem::path& root, int port);

} // namespace cartogan::pipeline

#endif
