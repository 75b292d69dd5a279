#include "hn/server.hpp"

#include <httplib.h>

#include "hn/error.hpp"
#include "hn/text.hpp"

namespace hn {

// ---------------------------------------------------------------------------
// Service

Service::Service(std::filesystem::path data_dir, int snapshot_every)
    : dir_(std::move(data_dir)), snapshot_every_(snapshot_every) {
    dir_.lock();
    LoadedSite loaded = load_site(dir_);
    workbook_ = std::move(loaded.workbook);
    audit_ = std::move(loaded.audit);
    workbook_.set_sink([this](const Event& e) { on_event(e); });
    publish();
}

Service::~Service() {
    try {
        write_snapshot();
    } catch (const std::exception&) {
    }
}

std::shared_ptr<const Site> Service::snapshot() const {
    std::lock_guard lock(snap_mu_);
    return snap_;
}

void Service::publish() {
    auto next = workbook_.snapshot();
    std::lock_guard lock(snap_mu_);
    snap_ = std::move(next);
}

void Service::on_event(const Event& e) {
    dir_.append(e);
    {
        std::unique_lock lock(audit_mu_);
        audit_.add(e);
    }
    if (++since_snapshot_ >= snapshot_every_) {
        dir_.write_snapshot(workbook_.site());
        since_snapshot_ = 0;
    }
}

void Service::write_snapshot() {
    std::lock_guard lock(writer_);
    dir_.write_snapshot(workbook_.site());
    since_snapshot_ = 0;
}

void Service::set_clock(Workbook::Clock clock) {
    std::lock_guard lock(writer_);
    workbook_.set_clock(std::move(clock));
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

struct Unauthorized : Error {
    using Error::Error;
};

struct BadRequest : Error {
    using Error::Error;
};

void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(-1, ' ', false, json::error_handler_t::replace), "application/json");
}

void send_error(httplib::Response& res, int status, const char* kind, const std::string& message) {
    send(res, status, {{"error", kind}, {"message", message}});
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
    try {
        send(res, 200, fn());
    } catch (const Unauthorized& e) {
        send_error(res, 401, "unauthorized", e.what());
    } catch (const PermissionDenied& e) {
        send_error(res, 403, "permission_denied", e.what());
    } catch (const NotFound& e) {
        send_error(res, 404, "not_found", e.what());
    } catch (const AlreadyExists& e) {
        send_error(res, 409, "already_exists", e.what());
    } catch (const ParseError& e) {
        send(res, 422, {{"error", "parse_error"}, {"message", e.message()}, {"position", e.position()}});
    } catch (const JournalError& e) {
        send_error(res, 500, "journal_error", e.what());
    } catch (const Error& e) {
        send_error(res, 400, "bad_request", e.what());
    } catch (const json::exception& e) {
        send_error(res, 400, "bad_request", e.what());
    } catch (const std::logic_error& e) {
        send_error(res, 400, "bad_request", e.what());
    }
}

std::string token_of(const httplib::Request& req) {
    std::string auth = req.get_header_value("Authorization");
    if (auth.starts_with("Bearer ")) return auth.substr(7);
    return req.get_header_value("X-HN-Token");
}

json body_of(const httplib::Request& req) {
    json j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw BadRequest("request body must be a JSON object");
    return j;
}

std::string str_field(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) throw BadRequest(std::string("missing string field: ") + key);
    return j[key].get<std::string>();
}

int int_field(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer()) throw BadRequest(std::string("missing integer field: ") + key);
    return j[key].get<int>();
}

Path page_path(std::string raw) {
    if (raw.empty() || raw.back() != '/') raw.push_back('/');
    if (raw.front() != '/') raw.insert(raw.begin(), '/');
    return canonicalize_path(raw, Path());
}

CellAddr cell_ref(const std::string& ref) {
    auto a = parse_a1(ref);
    if (!a) throw BadRequest("bad cell reference: " + ref);
    return *a;
}

std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "TRUE" : "FALSE";
    if (v.is_number()) return format_number(v.get<double>());
    throw BadRequest("values must be scalars");
}

/// Commit summary limited to cells the user can at least read.
json summary(const Site& site, const std::string& user, const Event& e) {
    json cells = json::array();
    for (const auto& c : e.changes) {
        if (!check(site, user, c.path, ViewKind::Webpage)) continue;
        cells.push_back({{"path", c.path.str()},
                         {"ref", to_a1(c.addr)},
                         {"value", value_to_json(c.after.value)},
                         {"display", display(c.after.value)}});
    }
    return {{"seq", e.seq}, {"ts", e.ts}, {"changed", e.changes.size()}, {"cells", cells}};
}

ViewKind view_field(const std::string& text) {
    auto v = parse_view_kind(text);
    if (!v) throw BadRequest("unknown view: " + text);
    return *v;
}

void require_admin(const Site& site, const std::string& user) {
    if (!is_admin(site, user)) throw PermissionDenied("admin only");
}

std::optional<std::int64_t> time_param(const httplib::Request& req, const char* key) {
    if (!req.has_param(key)) return std::nullopt;
    std::string v = req.get_param_value(key);
    if (v.empty()) return std::nullopt;
    return parse_timestamp(v);
}

void window(json& doc, const httplib::Request& req) {
    if (!doc.contains("cells") || (!req.has_param("from_row") && !req.has_param("to_row"))) return;
    int from = req.has_param("from_row") ? std::stoi(req.get_param_value("from_row")) : 1;
    int to = req.has_param("to_row") ? std::stoi(req.get_param_value("to_row")) : kMaxRow;
    json kept = json::array();
    for (auto& c : doc["cells"]) {
        int row = parse_a1(c["ref"].get<std::string>())->row;
        if (row >= from && row <= to) kept.push_back(std::move(c));
    }
    doc["cells"] = std::move(kept);
    doc["window"] = {{"from_row", from}, {"to_row", to}};
}

}  // namespace

Server::Server(Service& service) : service_(service), http_(std::make_unique<httplib::Server>()) {
    http_->set_payload_max_length(64u << 20);
    routes();
}

Server::~Server() { stop(); }

void Server::routes() {
    auto& s = service_;
    auto user_of = [&s](const httplib::Request& req) {
        std::string token = token_of(req);
        if (token.empty()) throw Unauthorized("missing session token");
        auto user = s.sessions().lookup(token);
        if (!user) throw Unauthorized("invalid or expired session");
        if (!s.snapshot()->users.contains(*user)) throw Unauthorized("user no longer exists");
        return *user;
    };

    http_->Post("/_api/login", [&s](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&]() -> json {
            json b = body_of(req);
            std::string id = str_field(b, "user");
            std::string pw = str_field(b, "password");
            auto site = s.snapshot();
            auto it = site->users.find(id);
            if (it == site->users.end() || !verify_password(it->second, pw)) throw Unauthorized("bad credentials");
            return {{"token", s.sessions().create(id)}, {"user", id}};
        });
    });

    http_->Post("/_api/logout", [&s](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&]() -> json {
            s.sessions().revoke(token_of(req));
            return {{"ok", true}};
        });
    });

    http_->Get("/_api/me", [&s, user_of](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&]() -> json {
            std::string user = user_of(req);
            return {{"user", user}, {"admin", is_admin(*s.snapshot(), user)}};
        });
    });

    http_->Post("/_api/templates", [&s, user_of](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&]() -> json {
            std::string user = user_of(req);
            json b = body_of(req);
            Path page = page_path(str_field(b, "path"));
            std::string name = str_field(b, "name");
            return s.write([&](Workbook& wb) -> json {
                require(wb.site(), user, page, ViewKind::Spreadsheet);
                Event e = wb.save_template(user, page, name);
                return {{"seq", e.seq}, {"template", e.payload["name"]}};
            });
        });
    });

    http_->Post("/_api/admin/users", [&s, user_of](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&]() -> json {
            std::string user = user_of(req);
            json b = body_of(req);
            std::string op = str_field(b, "op");
            std::string id = str_field(b, "user");
            json cmd = {{"user", id}};
            if (op == "add" || op == "passwd") {
                std::string salt = new_salt();
                cmd["op"] = op == "add" ? "useradd" : "passwd";
                cmd["salt"] = salt;
                cmd["hash"] = hash_password(str_field(b, "password"), salt);
            } else if (op == "delete") {
                cmd["op"] = "userdel";
            } else {
                throw BadRequest("unknown op: " + op);
            }
            return s.write([&](Workbook& wb) -> json {
                require_admin(wb.site(), user);
                return {{"seq", wb.user_admin(user, cmd).seq}};
            });
        });
    });

    http_->Post("/_api/admin/groups", [&s, user_of](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&]() -> json {
            std::string user = user_of(req);
            json b = body_of(req);
            std::string op = str_field(b, "op");
            json cmd = {{"group", str_field(b, "group")}};
            if (op == "add") cmd["op"] = "groupadd";
            else if (op == "delete") cmd["op"] = "groupdel";
            else if (op == "member_add" || op == "member_remove") {
                cmd["op"] = op;
                cmd["user"] = str_field(b, "user");
            } else {
                throw BadRequest("unknown op: " + op);
            }
            return s.write([&](Workbook& wb) -> json {
                require_admin(wb.site(), user);
                return {{"seq", wb.user_admin(user, cmd).seq}};
            });
        });
    });

    http_->Post("/_api/admin/grants", [&s, user_of](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&]() -> json {
            std::string user = user_of(req);
            json b = body_of(req);
            std::string op = str_field(b, "op");
            Path path = page_path(str_field(b, "path"));
            ViewKind view = view_field(str_field(b, "view"));
            std::string group = str_field(b, "group");
            if (op != "grant" && op != "revoke") throw BadRequest("unknown op: " + op);
            return s.write([&](Workbook& wb) -> json {
                require_admin(wb.site(), user);
                Event e = op == "grant" ? wb.grant(user, path, view, group) : wb.revoke(user, path, view, group);
                return {{"seq", e.seq}};
            });
        });
    });

    http_->Get("/_api/audit/cell", [&s, user_of](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&]() -> json {
            std::string user = user_of(req);
            Path page = page_path(req.get_param_value("path"));
            CellAddr addr = cell_ref(req.get_param_value("ref"));
            auto site = s.snapshot();
            json entries = json::array();
            for (const auto& e : s.read_audit([&](const AuditLog& log) {
                     return checked_cell_history(log, *site, user, page, addr);
                 }))
                entries.push_back(entry_to_json(e));
            return {{"path", page.str()}, {"ref", to_a1(addr)}, {"entries", entries}};
        });
    });

    http_->Get("/_api/audit/user", [&s, user_of](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&]() -> json {
            std::string user = user_of(req);
            std::string target = req.get_param_value("user");
            auto from = time_param(req, "from");
            auto to = time_param(req, "to");
            auto site = s.snapshot();
            json entries = json::array();
            for (const auto& e : s.read_audit([&](const AuditLog& log) {
                     return checked_user_trail(log, *site, user, target, from, to);
                 }))
                entries.push_back(entry_to_json(e));
            return {{"user", target}, {"entries", entries}};
        });
    });

    http_->Post(R"((.*)/_commit)", [&s, user_of](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&]() -> json {
            std::string user = user_of(req);
            Path page = page_path(req.matches[1]);
            json b = body_of(req);
            if (!b.contains("updates") || !b["updates"].is_array()) throw BadRequest("missing updates array");
            std::vector<CellWrite> writes;
            for (const auto& u : b["updates"]) {
                if (!u.is_object()) throw BadRequest("updates must be objects");
                CellWrite w{cell_ref(str_field(u, "ref")), std::nullopt, std::nullopt, std::nullopt};
                if (u.contains("source")) w.source = scalar_text(u["source"]);
                if (u.contains("attrs")) w.attrs = u["attrs"].is_null() ? CellAttrs{} : attrs_from_json(u["attrs"]);
                if (u.contains("format")) w.format = u["format"].is_null() ? "" : str_field(u, "format");
                writes.push_back(std::move(w));
            }
            return s.write([&](Workbook& wb) -> json {
                require(wb.site(), user, page, ViewKind::Spreadsheet);
                Event e = wb.set_cells(user, page, writes);
                return summary(wb.site(), user, e);
            });
        });
    });

    http_->Post(R"((.*)/_wiki)", [&s, user_of](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&]() -> json {
            std::string user = user_of(req);
            Path page = page_path(req.matches[1]);
            json b = body_of(req);
            std::string tx = b.contains("transaction") ? str_field(b, "transaction") : std::string();
            if (!b.contains("inputs") || !b["inputs"].is_object()) throw BadRequest("missing inputs object");
            std::map<CellAddr, std::string> inputs;
            for (const auto& [ref, v] : b["inputs"].items()) inputs[cell_ref(ref)] = scalar_text(v);
            return s.write([&](Workbook& wb) -> json {
                Event e = wiki_submit(wb, user, page, tx, inputs);
                return summary(wb.site(), user, e);
            });
        });
    });

    http_->Post(R"((.*)/_table)", [&s, user_of](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&]() -> json {
            std::string user = user_of(req);
            Path page = page_path(req.matches[1]);
            json b = body_of(req);
            std::string op = str_field(b, "op");
            json values = b.value("values", json::object());
            return s.write([&](Workbook& wb) -> json {
                Event e;
                if (op == "append") e = table_append(wb, user, page, values);
                else if (op == "update") e = table_update(wb, user, page, int_field(b, "row"), values);
                else if (op == "delete") e = table_delete(wb, user, page, int_field(b, "row"));
                else throw BadRequest("unknown table op: " + op);
                return summary(wb.site(), user, e);
            });
        });
    });

    http_->Post(R"((.*)/_structural)", [&s, user_of](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&]() -> json {
            std::string user = user_of(req);
            Path page = page_path(req.matches[1]);
            json b = body_of(req);
            std::string op = str_field(b, "op");
            if (op != "insert_rows" && op != "delete_rows" && op != "insert_cols" && op != "delete_cols")
                throw BadRequest("unknown structural op: " + op);
            int at = int_field(b, "at");
            int count = b.contains("count") ? int_field(b, "count") : 1;
            return s.write([&](Workbook& wb) -> json {
                require(wb.site(), user, page, ViewKind::Spreadsheet);
                auto e = wb.structural(user, page, op.ends_with("_cols") ? Axis::Cols : Axis::Rows,
                                       op.starts_with("insert_"), at, count);
                if (!e) return {{"seq", wb.site().seq}, {"changed", 0}, {"cells", json::array()}};
                return summary(wb.site(), user, *e);
            });
        });
    });

    http_->Post(R"((.*)/_page)", [&s, user_of](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&]() -> json {
            std::string user = user_of(req);
            Path page = page_path(req.matches[1]);
            json b = body_of(req);
            std::string op = str_field(b, "op");
            std::optional<std::string> tpl;
            if (b.contains("template")) tpl = str_field(b, "template");
            return s.write([&](Workbook& wb) -> json {
                require(wb.site(), user, page, ViewKind::Spreadsheet);
                if (op == "create") {
                    if (page.depth() > 0 && page.segments()[0] == "_api") throw BadRequest("reserved path");
                    auto e = wb.create_page(user, page, tpl);
                    if (!e) throw AlreadyExists("page already exists: " + page.str());
                    return {{"seq", e->seq}, {"path", page.str()}};
                }
                if (op == "delete") return {{"seq", wb.delete_page(user, page).seq}};
                throw BadRequest("unknown page op: " + op);
            });
        });
    });

    http_->Post(R"((.*)/_action/create)", [&s, user_of](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&]() -> json {
            std::string user = user_of(req);
            Path page = page_path(req.matches[1]);
            json b = body_of(req);
            CellAddr addr = cell_ref(str_field(b, "cell"));
            return s.write([&](Workbook& wb) -> json {
                Event e = activate_create_button(wb, user, page, addr);
                json created = json::array();
                for (const auto& p : e.payload["pages"]) created.push_back(p["path"]);
                return {{"seq", e.seq}, {"redirect", e.payload["redirect"]}, {"created", created}};
            });
        });
    });

    http_->Get(R"(/.*)", [&s, user_of](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&]() -> json {
            std::string user = user_of(req);
            Path page = page_path(req.path);
            auto site = s.snapshot();
            ViewKind view;
            if (req.has_param("view") && !req.get_param_value("view").empty()) {
                view = view_field(req.get_param_value("view"));
            } else {
                auto v = default_view(*site, user, page);
                if (!v) throw PermissionDenied("no view of " + page.str() + " is granted to " + user);
                view = *v;
            }
            json doc = view == ViewKind::Log
                           ? s.read_audit([&](const AuditLog& log) { return render_view(*site, &log, user, page, view); })
                           : render_view(*site, nullptr, user, page, view);
            window(doc, req);
            return doc;
        });
    });
}

int Server::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = http_->bind_to_any_port(host);
        if (bound < 0) throw Error("cannot bind " + host);
    } else if (!http_->bind_to_port(host, port)) {
        throw Error("cannot bind " + host + ":" + std::to_string(port));
    }
    thread_ = std::make_unique<std::thread>([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
    return bound;
}

bool Server::listen(const std::string& host, int port) { return http_->listen(host, port); }

void Server::stop() {
    if (http_) http_->stop();
    if (thread_ && thread_->joinable()) thread_->join();
    thread_.reset();
}

}  // namespace hn
