/*
 * Copyright 2026 The embex Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"

#include "embex/serialize.hpp"
#include "embex/service/server.hpp"

#include <httplib.h>

#include <fstream>
#include <thread>

using namespace embex;
using embex::testing::TempDir;

namespace {

struct Fixture {
    Fixture() {
        std::mt19937_64 rng(5);
        model = std::make_shared<const EmbeddingModel>(
            embex::testing::random_model(rng, 1000, 12).with_meta({0, FeatureKind::wordform, 5, 5, "fixture"}));
        lemma = std::make_shared<const EmbeddingModel>(
            embex::testing::random_model(rng, 200, 12).with_meta({0, FeatureKind::lemma_lower, 20, 5, "lemma"}));
        cfg.data_dir = dir / "data";
        cfg.job_workers = 1;
    }
    void start() {
        server = std::make_unique<service::Server>(cfg);
        server->models().add("wf", model);
        server->models().add("lm", lemma);
        port = server->start();
        client = std::make_unique<httplib::Client>("127.0.0.1", port);
        client->set_read_timeout(60, 0);
    }
    httplib::Result get(const std::string &path) { return client->Get(path); }
    httplib::Result post(const std::string &path, const json &body) {
        return client->Post(path, body.dump(), "application/json");
    }
    json wait(const std::string &id) {
        for (int i = 0; i < 3000; ++i) {
            auto s = json::parse(get("/jobs/" + id)->body);
            if (s["state"] == "done" || s["state"] == "failed") return s;
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
        FAIL("job did not finish");
        return {};
    }

    TempDir dir;
    std::shared_ptr<const EmbeddingModel> model, lemma;
    service::ServiceConfig cfg;
    std::unique_ptr<service::Server> server;
    std::unique_ptr<httplib::Client> client;
    int port = 0;
};

std::string enc(const std::string &s) { return httplib::detail::encode_query_param(s); }

} // namespace

TEST_CASE_FIXTURE(Fixture, "empty registry lists nothing") {
    service::Server bare(cfg);
    const int p = bare.start();
    httplib::Client c("127.0.0.1", p);
    auto r = c.Get("/models");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(json::parse(r->body) == json::array());
}

TEST_CASE_FIXTURE(Fixture, "model listing and filters") {
    start();
    auto all = json::parse(get("/models")->body);
    REQUIRE(all.size() == 2);
    CHECK(all[0]["state"] == "ready");
    CHECK(json::parse(get("/models?feature_kind=lemma_lower")->body).size() == 1);
    CHECK(json::parse(get("/models?dim=12")->body).size() == 2);
    CHECK(json::parse(get("/models?dim=300")->body).empty());
    CHECK(json::parse(get("/models?min_frequency_threshold=10")->body).size() == 1);
    CHECK(get("/models?feature_kind=bogus")->status == 400);
}

TEST_CASE_FIXTURE(Fixture, "vector endpoint and its error codes") {
    start();
    const auto &tok = model->token(4);
    auto r = get("/models/wf/vector?token=" + enc(tok));
    REQUIRE(r->status == 200);
    const auto body = json::parse(r->body);
    REQUIRE(body["vector"].size() == 12);
    for (std::size_t d = 0; d < 12; ++d) CHECK(body["vector"][d].get<float>() == model->row(4)[d]);

    auto oov = get("/models/wf/vector?token=absent");
    CHECK(oov->status == 404);
    CHECK(json::parse(oov->body)["error"] == "out_of_vocabulary");
    CHECK(json::parse(oov->body)["token"] == "absent");
    auto unknown = get("/models/nope/vector?token=x");
    CHECK(unknown->status == 404);
    CHECK(json::parse(unknown->body)["error"] == "unknown_model");
    CHECK(get("/models/wf/vector")->status == 400);
}

TEST_CASE_FIXTURE(Fixture, "similar defaults, caps and rejects k=0") {
    start();
    const auto &tok = model->token(0);
    CHECK(json::parse(get("/models/wf/similar?token=" + enc(tok))->body).size() == 10);
    CHECK(json::parse(get("/models/wf/similar?token=" + enc(tok) + "&k=5000")->body).size() == 999);
    CHECK(get("/models/wf/similar?token=" + enc(tok) + "&k=0")->status == 400);
    CHECK(get("/models/wf/similar?token=" + enc(tok) + "&k=abc")->status == 400);
    CHECK(get("/models/wf/similar?token=" + enc(tok) + "&case_fallback=maybe")->status == 400);
}

TEST_CASE_FIXTURE(Fixture, "analogy parameter errors") {
    start();
    const auto a = enc(model->token(0)), b = enc(model->token(1));
    CHECK(get("/models/wf/analogy?a=" + a + "&b=" + b)->status == 400);
    auto oov = get("/models/wf/analogy?a=" + a + "&b=" + b + "&c=lipsă");
    CHECK(oov->status == 404);
    CHECK(json::parse(oov->body)["token"] == "lipsă");
    auto ok = json::parse(get("/models/wf/analogy?a=" + a + "&b=" + b + "&c=" + enc(model->token(2)))->body);
    CHECK(ok["neighbors"].size() == 10);
    CHECK(ok["trace"]["query"].size() == 12);
}

TEST_CASE_FIXTURE(Fixture, "t-SNE job selections") {
    start();
    auto r = post("/models/wf/tsne", json{{"top_frequent_n", 300}, {"config", {{"n_iter", 100}}}});
    REQUIRE(r->status == 202);
    const std::string id = json::parse(r->body)["id"];
    CHECK(json::parse(r->body)["kind"] == "tsne");
    auto s = wait(id);
    CHECK(s["state"] == "done");
    CHECK(s["result_ref"] == "/jobs/" + id + "/result");
    CHECK(s["progress"]["iteration"] == 100);
    auto first = get("/jobs/" + id + "/result"), second = get("/jobs/" + id + "/result");
    CHECK(first->body == second->body);
    const auto layout = json::parse(first->body);
    CHECK(layout["tokens"].size() == 300);
    CHECK(layout["coords"].size() == 300);
    CHECK(layout["tokens"] == json(top_n_frequent(*model, 300)));

    auto sim = post("/models/wf/tsne",
                    json{{"similar_to", model->token(3)}, {"n", 5}, {"config", {{"perplexity", 1.5}, {"n_iter", 50}}}});
    REQUIRE(sim->status == 202);
    const auto simlayout = json::parse(get("/jobs/" + wait(json::parse(sim->body)["id"])["id"].get<std::string>() +
                                           "/result")
                                           ->body);
    REQUIRE(simlayout["tokens"].size() == 6);
    CHECK(simlayout["tokens"][0] == model->token(3));

    auto listed = json::parse(get("/jobs")->body);
    CHECK(listed.size() == 2);
}

TEST_CASE_FIXTURE(Fixture, "t-SNE submission errors") {
    start();
    auto both = post("/models/wf/tsne", json{{"tokens", {model->token(0)}}, {"top_frequent_n", 5}});
    CHECK(both->status == 400);
    CHECK(json::parse(both->body)["error"] == "bad_selection");
    CHECK(post("/models/wf/tsne", json::object())->status == 400);
    CHECK(post("/models/wf/tsne", json{{"similar_to", model->token(0)}})->status == 400);
    CHECK(post("/models/wf/tsne", json{{"tokens", {model->token(0), "lipsă", model->token(1), model->token(2)}}})->status ==
          404);
    auto perp = post("/models/wf/tsne", json{{"top_frequent_n", 20}});
    CHECK(perp->status == 400);
    CHECK(json::parse(perp->body)["error"] == "perplexity_too_large");
    CHECK(post("/models/wf/tsne", json{{"top_frequent_n", 200}, {"config", {{"pca", true}}}})->status == 400);
    CHECK(get("/jobs/j999")->status == 404);
    CHECK(get("/jobs/j999/result")->status == 404);
}

TEST_CASE_FIXTURE(Fixture, "result of an unfinished job is a conflict") {
    start();
    auto r = post("/models/wf/tsne", json{{"top_frequent_n", 1000}, {"config", {{"n_iter", 5000}}}});
    const std::string id = json::parse(r->body)["id"];
    auto early = get("/jobs/" + id + "/result");
    CHECK(early->status == 409);
    CHECK(json::parse(early->body)["error"] == "job_not_done");
}

TEST_CASE_FIXTURE(Fixture, "graph sessions") {
    start();
    auto built = post("/graphs", json{{"model_id", "wf"}, {"center", model->token(0)}, {"n", 3}});
    REQUIRE(built->status == 201);
    const auto body = json::parse(built->body);
    const std::string gid = body["graph_id"];
    CHECK(body["graph"]["nodes"].size() == 4);
    auto absent = post("/graphs/" + gid + "/expand", json{{"token", "lipsă"}, {"n", 2}});
    CHECK(absent->status == 404);
    CHECK(json::parse(absent->body)["error"] == "node_not_in_graph");
    CHECK(get("/graphs/g404")->status == 404);
    CHECK(post("/graphs", json{{"model_id", "wf"}, {"center", model->token(0)}})->status == 400);
    auto added = post("/graphs/" + gid + "/add", json{{"token", model->token(500)}, {"n", 0}});
    CHECK(added->status == 200);
    CHECK(json::parse(added->body)["nodes"].size() == 5);
}

TEST_CASE_FIXTURE(Fixture, "graph node cap surfaces as 409") {
    std::mt19937_64 rng(8);
    auto big = std::make_shared<const EmbeddingModel>(embex::testing::random_model(rng, 6000, 40));
    start();
    server->models().add("big", big);
    auto built = json::parse(post("/graphs", json{{"model_id", "big"}, {"center", big->token(0)}, {"n", 1000}})->body);
    const std::string gid = built["graph_id"];
    int status = 200;
    json last;
    for (std::size_t i = 1; i < 200 && status == 200; ++i) {
        auto r = post("/graphs/" + gid + "/expand", json{{"token", built["graph"]["nodes"][i]["token"]}, {"n", 1000}});
        status = r->status;
        last = json::parse(r->body);
    }
    CHECK(status == 409);
    CHECK(last["error"] == "graph_cap_exceeded");
    CHECK(json::parse(get("/graphs/" + gid)->body)["nodes"].size() <= 5000);
}

TEST_CASE_FIXTURE(Fixture, "graphs persist across restarts only when enabled") {
    cfg.graph_dir = dir / "graphs";
    start();
    auto built = json::parse(post("/graphs", json{{"model_id", "wf"}, {"center", model->token(0)}, {"n", 3}})->body);
    const std::string gid = built["graph_id"];
    post("/graphs/" + gid + "/expand", json{{"token", model->token(0)}, {"n", 6}});
    const auto before = get("/graphs/" + gid)->body;
    server->stop();
    start();
    auto again = get("/graphs/" + gid);
    REQUIRE(again->status == 200);
    CHECK(again->body == before);
    auto next = json::parse(post("/graphs", json{{"model_id", "wf"}, {"center", model->token(1)}, {"n", 1}})->body);
    CHECK(next["graph_id"] != gid);

    server->stop();
    cfg.graph_dir.reset();
    start();
    CHECK(get("/graphs/" + gid)->status == 404);
}

TEST_CASE_FIXTURE(Fixture, "training jobs") {
    start();
    const auto corpus = embex::testing::inflected_corpus(2, 10, 2000);
    {
        std::ofstream out(dir / "toy.tsv");
        for (const auto &s : corpus.sentences) {
            for (const auto &t : s) out << t.wordform << '\t' << t.lemma << '\t' << t.pos << '\n';
            out << '\n';
        }
    }
    CHECK(post("/corpora", json{{"id", "toy"}, {"path", (dir / "toy.tsv").string()}})->status == 201);
    CHECK(json::parse(get("/corpora")->body).size() == 1);
    CHECK(post("/corpora", json{{"id", "missing"}, {"path", (dir / "nope.tsv").string()}})->status == 404);

    auto r = post("/train", json{{"corpus_ref", "toy"},
                                 {"feature", "wordform"},
                                 {"config", {{"dim", 8}, {"epochs", 1}, {"min_count", 1}}}});
    REQUIRE(r->status == 202);
    auto s = wait(json::parse(r->body)["id"]);
    REQUIRE(s["state"] == "done");
    const auto result = json::parse(get("/jobs/" + s["id"].get<std::string>() + "/result")->body);
    const std::string mid = result["model_id"];
    CHECK(std::filesystem::exists(result["path"].get<std::string>()));
    auto sim = get("/models/" + mid + "/similar?token=" + enc(embex::testing::stem_name(0)) + "&k=3");
    CHECK(sim->status == 200);
    CHECK(json::parse(sim->body).size() == 3);
    auto listed = json::parse(get("/models?feature_kind=wordform")->body);
    CHECK(std::any_of(listed.begin(), listed.end(), [&](const json &e) { return e["id"] == mid; }));

    CHECK(post("/train", json{{"corpus_ref", "toy"}, {"config", {{"dim", 0}}}})->status == 400);
    CHECK(post("/train", json{{"corpus_ref", "ghost"}})->status == 404);
    CHECK(post("/train", json{{"corpus_ref", "toy"}, {"feature", "stem"}})->status == 400);

    auto empty = post("/train", json{{"corpus_ref", "toy"}, {"config", {{"dim", 8}, {"min_count", 1000000}}}});
    REQUIRE(empty->status == 202);
    auto failed = wait(json::parse(empty->body)["id"]);
    CHECK(failed["state"] == "failed");
    CHECK(failed["error"].get<std::string>().find("empty_vocab") != std::string::npos);
    auto res = get("/jobs/" + failed["id"].get<std::string>() + "/result");
    CHECK(res->status == 409);
    CHECK(json::parse(res->body)["error"] == "job_failed");
}

TEST_CASE_FIXTURE(Fixture, "model registration over HTTP and from a config file") {
    start();
    save_text(*lemma, dir / "extra.vec");
    auto r = post("/models", json{{"id", "extra"}, {"path", (dir / "extra.vec").string()}});
    CHECK(r->status == 201);
    CHECK(json::parse(r->body)["meta"]["feature_kind"] == "lemma_lower");
    CHECK(post("/models", json{{"id", "extra"}, {"path", (dir / "extra.vec").string()}})->status == 400);
    auto broken = post("/models", json{{"id", "broken"}, {"path", (dir / "absent.vec").string()}});
    CHECK(broken->status == 400);
    const auto entries = json::parse(get("/models")->body);
    CHECK(std::any_of(entries.begin(), entries.end(),
                      [](const json &e) { return e["id"] == "broken" && e["state"] == "failed"; }));
    CHECK(get("/models/broken/similar?token=x")->status == 404);

    {
        std::ofstream out(dir / "models.json");
        out << json::array({{{"id", "fromfile"}, {"path", "extra.vec"}}}).dump();
    }
    service::Server other(cfg);
    other.load_config(dir / "models.json");
    CHECK(other.models().get("fromfile")->size() == lemma->size());
}

TEST_CASE_FIXTURE(Fixture, "transport-level errors are JSON") {
    start();
    auto nf = get("/no/such/route");
    CHECK(nf->status == 404);
    CHECK(json::parse(nf->body)["error"] == "not_found");
    auto bad = client->Post("/graphs", "{not json", "application/json");
    CHECK(bad->status == 400);
    CHECK(json::parse(bad->body)["error"] == "malformed_json");
    auto opt = client->Options("/models");
    CHECK(opt->status == 204);
    CHECK(opt->get_header_value("Access-Control-Allow-Origin") == "*");
    CHECK(get("/health")->get_header_value("Access-Control-Allow-Origin") == "*");
}

TEST_CASE("environment overrides host and port") {
    ::setenv("EMBEX_PORT", "9123", 1);
    ::setenv("EMBEX_HOST", "127.0.0.2", 1);
    const auto c = service::apply_environment({});
    CHECK(c.port == 9123);
    CHECK(c.host == "127.0.0.2");
    ::unsetenv("EMBEX_PORT");
    ::unsetenv("EMBEX_HOST");
    CHECK(service::apply_environment({}).port == 8642);
}
