#pragma once

// HTTP preview API over one in-memory project.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include "files.hpp"
#include "mga/metamodel.hpp"
#include "mga/quality.hpp"
#include "mga/renderer.hpp"

namespace httplib {
class Server;
}

namespace mga::tools {

struct ServiceOptions {
  fs::path project_path;
  fs::path audio_dir;  // empty: the project file's directory
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port in bind()
  quality::ElementSpec spec = quality::default_segment_spec();
  std::optional<fs::path> static_dir;
};

/// Project plus the revision it is tagged with. Revision 1 is the state
/// loaded at startup; every committed PATCH adds one.
struct Snapshot {
  meta::Project project;
  std::uint64_t revision = 0;
};

class Service {
 public:
  /// Loads and validates the project and checks the audio directory.
  /// Throws on any problem so `serve` fails before binding a port.
  explicit Service(ServiceOptions options);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  const ServiceOptions& options() const noexcept { return options_; }
  Snapshot snapshot() const;

  /// Binds the listening socket; returns the bound port.
  int bind();
  /// Serves until stop(). Call after bind().
  bool listen_after_bind();
  /// bind() + listen_after_bind().
  bool listen();
  void stop();
  bool is_running() const;

 private:
  void install_routes();

  ServiceOptions options_;
  LoadedProject origin_;
  render::AudioSources sources_;

  mutable std::shared_mutex mutex_;
  Snapshot state_;

  std::unique_ptr<httplib::Server> server_;
};

}  // namespace mga::tools
