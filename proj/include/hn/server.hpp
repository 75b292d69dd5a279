#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>

#include "hn/access.hpp"
#include "hn/audit.hpp"
#include "hn/auth.hpp"
#include "hn/persist.hpp"

namespace httplib {
class Server;
}

namespace hn {

/// State shared by every request: the single-writer workbook, the journal,
/// the audit index and the published read snapshot.
class Service {
public:
    /// Locks and loads the data directory.
    explicit Service(std::filesystem::path data_dir, int snapshot_every = 100);
    ~Service();

    std::shared_ptr<const Site> snapshot() const;

    /// Runs `fn(workbook)` under the writer lock, then publishes a new
    /// snapshot. Events committed by `fn` are journaled and indexed.
    template <typename Fn>
    auto write(Fn&& fn) {
        std::lock_guard lock(writer_);
        struct Publish {
            Service& s;
            ~Publish() { s.publish(); }
        } publish{*this};
        return fn(workbook_);
    }

    /// Runs `fn(audit)` with the audit index held for reading.
    template <typename Fn>
    auto read_audit(Fn&& fn) const {
        std::shared_lock lock(audit_mu_);
        return fn(audit_);
    }

    Sessions& sessions() { return sessions_; }
    void write_snapshot();
    /// Test hook: fixes the workbook clock.
    void set_clock(Workbook::Clock clock);

private:
    void publish();
    void on_event(const Event& e);

    DataDir dir_;
    Workbook workbook_;
    AuditLog audit_;
    Sessions sessions_;
    int snapshot_every_;
    int since_snapshot_ = 0;
    std::mutex writer_;
    mutable std::shared_mutex audit_mu_;
    mutable std::mutex snap_mu_;
    std::shared_ptr<const Site> snap_;
};

/// HTTP facade over a Service.
class Server {
public:
    explicit Server(Service& service);
    ~Server();

    /// Binds and serves on a background thread; returns the bound port
    /// (pass 0 for an ephemeral one). Throws Error when binding fails.
    int start(const std::string& host, int port);
    /// Blocks serving on the calling thread.
    bool listen(const std::string& host, int port);
    void stop();

private:
    void routes();

    Service& service_;
    std::unique_ptr<httplib::Server> http_;
    std::unique_ptr<std::thread> thread_;
};

}  // namespace hn
