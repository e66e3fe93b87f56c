#include "cprofile/cli/serve.hpp"

#include <map>
#include <mutex>

#include <spdlog/spdlog.h>

#include "cprofile/evolver/store.hpp"
#include "cprofile/responder/chat.hpp"
#include "cprofile/util/text.hpp"
#include "httplib.h"

namespace cprofile::cli {

namespace {

using Json = nlohmann::ordered_json;

void reply(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message) { reply(res, status, Json{{"error", message}}); }

Json triggered_json(const std::vector<engine::TriggeredStatement>& ts) {
    Json a = Json::array();
    for (const auto& t : ts) a.push_back(engine::to_json(t));
    return a;
}

struct Session {
    std::unique_ptr<responder::ChatSession> chat;
    int version = 0;
    std::mutex turn_mutex;
};

}  // namespace

struct ApiServer::Impl {
    ServeContext ctx;
    httplib::Server server;
    std::mutex mutex;
    std::map<std::string, std::shared_ptr<Session>> sessions;
    std::uint64_t next_id = 1;

    explicit Impl(ServeContext c) : ctx(std::move(c)) { routes(); }

    std::shared_ptr<Session> find(const std::string& id) {
        std::lock_guard lock(mutex);
        auto it = sessions.find(id);
        return it == sessions.end() ? nullptr : it->second;
    }

    Json session_json(const std::string& id, Session& s) {
        Json j;
        j["session_id"] = id;
        j["character"] = s.chat->character();
        j["version"] = s.version;
        j["turns"] = Json::array();
        for (const auto& t : s.chat->transcript()) j["turns"].push_back(responder::to_json(t));
        return j;
    }

    void routes() {
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                    {"Access-Control-Allow-Headers", "Content-Type"},
                                    {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"}});
        server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                fail(res, 500, e.what());
            } catch (...) {
                fail(res, 500, "internal error");
            }
        });

        server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json body;
            try {
                body = nlohmann::json::parse(req.body);
            } catch (const std::exception&) {
                return fail(res, 400, "body must be JSON");
            }
            if (!body.contains("character") || !body["character"].is_string()) return fail(res, 400, "character is required");
            const auto character = body["character"].get<std::string>();
            std::unique_ptr<evolver::VersionStore> store;
            try {
                store = std::make_unique<evolver::VersionStore>(evolver::VersionStore::open(ctx.profiles, character));
            } catch (const std::exception& e) {
                return fail(res, 404, e.what());
            }
            int version = store->head();
            if (body.contains("version") && !body["version"].is_null()) {
                if (!body["version"].is_number_integer()) return fail(res, 400, "version must be an integer");
                version = body["version"].get<int>();
                if (version < 0 || version > store->head()) return fail(res, 404, "no version " + std::to_string(version));
            }
            auto s = std::make_shared<Session>();
            s->version = version;
            std::string id;
            {
                std::lock_guard lock(mutex);
                id = "s" + std::to_string(next_id++);
            }
            s->chat = std::make_unique<responder::ChatSession>(id, store->character(), store->programs(version), ctx.oracle,
                                                               ctx.llm, ctx.seed);
            {
                std::lock_guard lock(mutex);
                sessions[id] = s;
            }
            reply(res, 201, Json{{"session_id", id}, {"character", store->character()}, {"version", version}});
        });

        server.Post(R"(/sessions/([^/]+)/turns)", [this](const httplib::Request& req, httplib::Response& res) {
            auto s = find(req.matches[1]);
            if (!s) return fail(res, 404, "no such session");
            nlohmann::json body;
            try {
                body = nlohmann::json::parse(req.body);
            } catch (const std::exception&) {
                return fail(res, 400, "body must be JSON");
            }
            if (!body.contains("user_text") || !body["user_text"].is_string() || body["user_text"].get<std::string>().empty()) {
                return fail(res, 400, "user_text is required");
            }
            std::lock_guard lock(s->turn_mutex);
            auto t = s->chat->turn(body["user_text"].get<std::string>());
            reply(res, 200, Json{{"response", t.response}, {"triggered", triggered_json(t.triggered)}, {"trace", engine::to_json(t.trace)}});
        });

        server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            auto s = find(req.matches[1]);
            if (!s) return fail(res, 404, "no such session");
            reply(res, 200, session_json(req.matches[1], *s));
        });

        server.Delete(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            std::shared_ptr<Session> s;
            {
                std::lock_guard lock(mutex);
                auto it = sessions.find(id);
                if (it == sessions.end()) return fail(res, 404, "no such session");
                s = it->second;
                sessions.erase(it);
            }
            std::string lines;
            for (const auto& t : s->chat->transcript()) lines += responder::to_json(t).dump() + "\n";
            const auto path = ctx.transcripts / (id + ".jsonl");
            write_text_file(path, lines);
            reply(res, 200, Json{{"session_id", id}, {"closed", true}, {"transcript", path.string()}});
        });

        server.Get("/profiles", [this](const httplib::Request&, httplib::Response& res) {
            Json out = Json::array();
            if (std::filesystem::is_directory(ctx.profiles)) {
                std::vector<std::filesystem::path> dirs;
                for (const auto& e : std::filesystem::directory_iterator(ctx.profiles)) {
                    if (std::filesystem::exists(e.path() / "store.json")) dirs.push_back(e.path());
                }
                std::sort(dirs.begin(), dirs.end());
                for (const auto& d : dirs) {
                    try {
                        const auto meta = nlohmann::json::parse(read_text_file(d / "store.json"));
                        out.push_back(Json{{"character", meta.at("character")}, {"head", meta.at("head")}, {"segments", meta.at("segments")}});
                    } catch (const std::exception& e) {
                        spdlog::warn("skipping unreadable store {}: {}", d.string(), e.what());
                    }
                }
            }
            reply(res, 200, out);
        });

        server.Get(R"(/profiles/([^/]+)/versions)", [this](const httplib::Request& req, httplib::Response& res) {
            try {
                auto store = evolver::VersionStore::open(ctx.profiles, req.matches[1]);
                Json versions = Json::array();
                versions.push_back(Json{{"version", 0}, {"provenance", "initial"}});
                Json revisions = Json::array();
                for (const auto& r : store.revisions()) {
                    versions.push_back(Json{{"version", r.version}, {"provenance", "revision"}, {"scene_id", r.scene_id},
                                            {"blamed_segment", r.blamed_segment}});
                    revisions.push_back(evolver::to_json(r));
                }
                reply(res, 200, Json{{"character", store.character()}, {"head", store.head()}, {"versions", versions},
                                     {"revisions", revisions}});
            } catch (const std::exception& e) {
                fail(res, 404, e.what());
            }
        });

        server.Get(R"(/profiles/([^/]+)/versions/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
            std::unique_ptr<evolver::VersionStore> store;
            try {
                store = std::make_unique<evolver::VersionStore>(evolver::VersionStore::open(ctx.profiles, req.matches[1]));
            } catch (const std::exception& e) {
                return fail(res, 404, e.what());
            }
            const int n = std::stoi(req.matches[2]);
            if (n > store->head()) return fail(res, 404, "no version " + std::to_string(n));
            Json sources = Json::object();
            const auto snap = store->snapshot(n);
            for (const auto& id : store->segment_ids()) sources[id] = snap.at(id);
            Json revision = nullptr;
            if (n > 0) revision = evolver::to_json(store->revisions().at(static_cast<std::size_t>(n - 1)));
            reply(res, 200, Json{{"character", store->character()}, {"version", n}, {"segments", store->segment_ids()},
                                 {"sources", sources}, {"revision", revision}});
        });

        server.Post("/eval/preview", [this](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json body;
            try {
                body = nlohmann::json::parse(req.body);
            } catch (const std::exception&) {
                return fail(res, 400, "body must be JSON");
            }
            if (!body.contains("character") || !body.contains("scene")) return fail(res, 400, "character and scene are required");
            std::unique_ptr<evolver::VersionStore> store;
            try {
                store = std::make_unique<evolver::VersionStore>(evolver::VersionStore::open(ctx.profiles, body["character"].get<std::string>()));
            } catch (const std::exception& e) {
                return fail(res, 404, e.what());
            }
            engine::Scene scene;
            try {
                auto sj = body["scene"];
                if (!sj.contains("id")) sj["id"] = "preview";
                if (!sj.contains("character")) sj["character"] = store->character();
                scene = engine::scene_from_json(sj);
            } catch (const std::exception& e) {
                return fail(res, 400, std::string("scene: ") + e.what());
            }
            engine::OracleCache memo;
            auto g = responder::ground(store->programs(store->head()), scene, ctx.oracle,
                                       engine::RunSeed{ctx.seed, scene.id, 0}, &memo);
            responder::RespondConfig cfg;
            auto rec = responder::respond(scene, store->character(), g, cfg, ctx.llm);
            reply(res, 200, Json{{"response", rec.response}, {"triggered", triggered_json(rec.triggered)},
                                 {"trace", engine::to_json(rec.trace)}, {"version", store->head()}});
        });
    }
};

ApiServer::ApiServer(ServeContext ctx) : impl_(std::make_unique<Impl>(std::move(ctx))) {}
ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool ApiServer::listen() { return impl_->server.listen_after_bind(); }

void ApiServer::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace cprofile::cli
