#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "hn/access.hpp"
#include "hn/auth.hpp"
#include "hn/csv.hpp"
#include "hn/error.hpp"
#include "hn/persist.hpp"
#include "hn/server.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kDataError = 2;
constexpr int kMismatch = 3;

const std::string kCliUser = "system";

/// Loads the locked data dir, runs `fn` with journaling on, then snapshots.
template <typename Fn>
void mutate(const std::filesystem::path& root, Fn&& fn) {
    hn::DataDir dir(root);
    dir.lock();
    hn::LoadedSite loaded = hn::load_site(dir);
    hn::Workbook& wb = loaded.workbook;
    wb.set_sink([&](const hn::Event& e) { dir.append(e); });
    fn(wb);
    dir.write_snapshot(wb.site());
}

int serve(const std::filesystem::path& root, const std::string& host, int port) {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    hn::Service service(root);
    hn::Server server(service);
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&set, &sig);
        server.stop();
    });
    waiter.detach();
    std::cerr << "serving " << root.string() << " on " << host << ":" << port << "\n";
    if (!server.listen(host, port)) {
        std::cerr << "hn: cannot listen on " << host << ":" << port << "\n";
        return kDataError;
    }
    return kOk;
}

int env_port() {
    if (const char* p = std::getenv("HN_PORT"); p && *p) return std::atoi(p);
    return 8642;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hierarchical spreadsheet server and operator tool"};
    app.require_subcommand(1);
    std::string data_dir = hn::DataDir::from_env().string();
    app.add_option("--data-dir", data_dir, "data directory (default HN_DATA_DIR or ./hn-data)");

    std::string host = "0.0.0.0";
    int port = env_port();
    auto* serve_cmd = app.add_subcommand("serve", "run the HTTP server");
    serve_cmd->add_option("--host", host);
    serve_cmd->add_option("--port", port);

    std::string id, password, name, group, user, view, path, file, tpl;
    bool has_password = false;
    auto* useradd = app.add_subcommand("useradd", "add a user");
    useradd->add_option("id", id)->required();
    useradd->add_option("--password", password)->each([&](const std::string&) { has_password = true; });

    auto* groupadd = app.add_subcommand("groupadd", "add a group");
    groupadd->add_option("name", name)->required();

    auto* member = app.add_subcommand("member", "add a user to a group");
    member->add_option("group", group)->required();
    member->add_option("user", user)->required();

    auto* grant = app.add_subcommand("grant", "grant a view of a path to a group");
    grant->add_option("view", view)->required();
    grant->add_option("path", path)->required();
    grant->add_option("group", group)->required();

    auto* mkpage = app.add_subcommand("mkpage", "create a page");
    mkpage->add_option("path", path)->required();
    mkpage->add_option("--template", tpl);

    auto* import = app.add_subcommand("import", "import CSV literals into a page");
    import->add_option("path", path)->required();
    import->add_option("file", file)->required();

    auto* exporter = app.add_subcommand("export", "export cached values of a page as CSV");
    exporter->add_option("path", path)->required();
    exporter->add_option("file", file)->required();

    auto* verify = app.add_subcommand("verify", "replay the journal and check it against the snapshot");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    std::filesystem::path root = data_dir;
    try {
        if (*serve_cmd) return serve(root, host, port);

        if (*verify) {
            hn::DataDir dir(root);
            hn::VerifyReport r = hn::verify_data(dir);
            if (!r.ok) {
                std::cerr << "verify failed at seq " << r.failed_seq << ": " << r.message << "\n";
                return kMismatch;
            }
            std::cout << "ok: " << r.events << " events\n";
            return kOk;
        }

        if (*exporter) {
            hn::DataDir dir(root);
            hn::LoadedSite loaded = hn::load_site(dir);
            hn::Path page = hn::canonicalize_path(path, hn::Path());
            const hn::Page* p = loaded.workbook.site().page(page);
            if (!p) throw hn::NotFound("page not found: " + page.str());
            std::string text = hn::write_csv(hn::page_rows(*p));
            if (file == "-") {
                std::cout << text;
            } else {
                std::ofstream out(file, std::ios::binary | std::ios::trunc);
                out << text;
                if (!out) throw hn::Error("cannot write " + file);
            }
            return kOk;
        }

        mutate(root, [&](hn::Workbook& wb) {
            if (*useradd) {
                std::string salt = has_password ? hn::new_salt() : std::string();
                std::string hash = has_password ? hn::hash_password(password, salt) : std::string();
                wb.user_admin(kCliUser, {{"op", "useradd"}, {"user", id}, {"salt", salt}, {"hash", hash}});
            } else if (*groupadd) {
                wb.user_admin(kCliUser, {{"op", "groupadd"}, {"group", name}});
            } else if (*member) {
                wb.user_admin(kCliUser, {{"op", "member_add"}, {"group", group}, {"user", user}});
            } else if (*grant) {
                auto v = hn::parse_view_kind(view);
                if (!v) throw hn::ValidationError("unknown view: " + view);
                wb.grant(kCliUser, hn::canonicalize_path(path, hn::Path()), *v, group);
            } else if (*mkpage) {
                hn::Path page = hn::canonicalize_path(path, hn::Path());
                std::optional<std::string> t;
                if (!tpl.empty()) t = tpl;
                if (!wb.create_page(kCliUser, page, t)) throw hn::AlreadyExists("page already exists: " + page.str());
            } else if (*import) {
                std::ifstream in(file, std::ios::binary);
                if (!in) throw hn::Error("cannot read " + file);
                std::stringstream ss;
                ss << in.rdbuf();
                auto writes = hn::csv_writes(hn::parse_csv(ss.str()));
                for (const auto& w : writes) hn::parse_input(*w.source);
                hn::Path page = hn::canonicalize_path(path, hn::Path());
                if (!wb.site().has_page(page)) wb.create_page(kCliUser, page);
                wb.set_cells(kCliUser, page, writes);
            }
        });
        return kOk;
    } catch (const hn::Error& e) {
        std::cerr << "hn: " << e.what() << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        std::cerr << "hn: " << e.what() << "\n";
        return kDataError;
    }
}
