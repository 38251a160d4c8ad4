#include <gtest/gtest.h>

#include <httplib.h>

#include <thread>

#include "mga/cli.hpp"
#include "mga/service.hpp"
#include "support.hpp"

namespace mga::tools {
namespace {

using json = nlohmann::json;
using mga::testing::TempDir;

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    fs::copy_file(mga::testing::fixture_path("lead_body_tail.xml"), dir_ / "story.xml");
    mga::testing::Rng rng(9);
    mga::testing::write_bytes(
        dir_ / "d.wav", container::write_container(container::make_pcm(
                            8000, 1, 16, mga::testing::noise_samples(rng, 8000 * 270, 1, 16))));
    ServiceOptions opts;
    opts.project_path = dir_ / "story.xml";
    opts.port = 0;
    service_ = std::make_unique<Service>(opts);
    port_ = service_->bind();
    thread_ = std::thread([this] { service_->listen_after_bind(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }

  void TearDown() override {
    service_->stop();
    thread_.join();
  }

  httplib::Result get(const std::string& path) { return client_->Get(path); }

  httplib::Result patch(const std::string& id, const std::string& body,
                        const httplib::Headers& headers = {}) {
    return client_->Patch("/api/segments/" + id, headers, body, "application/json");
  }

  static std::uint64_t revision(const httplib::Result& r) {
    return std::stoull(r->get_header_value("X-Revision"));
  }

  TempDir dir_;
  std::unique_ptr<Service> service_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(ServiceTest, ProjectCarriesRevision) {
  const auto r = get("/api/project");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(revision(r), 1u);
  const auto body = json::parse(r->body);
  EXPECT_EQ(body.at("revision"), 1);
  EXPECT_EQ(body, json::parse(get("/api/project")->body));
}

TEST_F(ServiceTest, AssembleMatchesCli) {
  const auto r = get("/api/assemble?target_ms=200000");
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 200);
  const auto cli = run({"mga", "assemble", (dir_ / "story.xml").string(), "--target", "200000"});
  ASSERT_EQ(cli.exit_code, 0);
  EXPECT_EQ(json::parse(r->body), json::parse(cli.out));
  // Idempotent: same body and revision on a second call.
  const auto again = get("/api/assemble?target_ms=200000");
  EXPECT_EQ(again->body, r->body);
  EXPECT_EQ(revision(again), revision(r));
}

TEST_F(ServiceTest, DomainErrorsAre422) {
  const auto r = get("/api/assemble?target_ms=0");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 422);
  const auto body = json::parse(r->body);
  EXPECT_EQ(body.at("code"), "TargetTooShort");
  EXPECT_TRUE(body.at("message").is_string());
  EXPECT_EQ(json::parse(get("/api/assemble")->body).at("code"), "InvalidArgument");
  EXPECT_EQ(get("/api/assemble?target_ms=abc")->status, 422);
}

TEST_F(ServiceTest, PatchLoiBumpsRevision) {
  const auto r = patch("body", R"({"loi": 1})");
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 200) << r->body;
  EXPECT_EQ(revision(r), 2u);
  EXPECT_EQ(json::parse(r->body).at("loi"), 1);

  // Lead and body are now both mandatory: 180 s of LOI-1 content.
  const auto short_target = get("/api/assemble?target_ms=60000");
  EXPECT_EQ(short_target->status, 422);
  EXPECT_EQ(json::parse(short_target->body).at("code"), "TargetTooShort");
  EXPECT_EQ(revision(short_target), 2u);

  const auto overflow = get("/api/assemble?target_ms=60000&allow_overflow=true");
  ASSERT_EQ(overflow->status, 200);
  const auto ob = json::parse(overflow->body);
  EXPECT_TRUE(ob.at("overflow").get<bool>());
  EXPECT_EQ(ob.at("included"), json({"lead", "body"}));

  const auto fits = get("/api/assemble?target_ms=200000");
  ASSERT_EQ(fits->status, 200);
  EXPECT_EQ(json::parse(fits->body).at("included"), json({"lead", "body"}));
  EXPECT_EQ(json::parse(fits->body).at("boundary_loi"), 1);
  EXPECT_EQ(service_->snapshot().revision, 2u);
}

TEST_F(ServiceTest, PatchLabelAndTopics) {
  const auto r = patch("tail", R"({"label": "Coda", "topics": ["music", "weather"]})");
  ASSERT_EQ(r->status, 200) << r->body;
  const auto snap = service_->snapshot();
  const auto* seg = snap.project.find_segment("tail");
  EXPECT_EQ(seg->label, "Coda");
  EXPECT_EQ(seg->topics, (std::set<std::string>{"music", "weather"}));
}

TEST_F(ServiceTest, PatchErrors) {
  EXPECT_EQ(patch("ghost", R"({"loi": 2})")->status, 404);
  EXPECT_EQ(patch("body", "{not json")->status, 400);
  EXPECT_EQ(patch("body", R"({"loi": 0})")->status, 422);
  EXPECT_EQ(patch("body", R"({"start": 5})")->status, 422);
  EXPECT_EQ(service_->snapshot().revision, 1u);
}

TEST_F(ServiceTest, StaleIfMatchConflicts) {
  ASSERT_EQ(patch("body", R"({"loi": 3})", {{"If-Match", "\"1\""}})->status, 200);
  const auto stale = patch("tail", R"({"loi": 2})", {{"If-Match", "\"1\""}});
  EXPECT_EQ(stale->status, 409);
  EXPECT_EQ(revision(stale), 2u);
  EXPECT_EQ(service_->snapshot().project.segments.back().loi, 3);
  EXPECT_EQ(patch("tail", R"({"loi": 2})", {{"If-Match", "W/\"2\""}})->status, 200);
}

TEST_F(ServiceTest, ConcurrentPatchesSerialize) {
  std::vector<std::thread> workers;
  std::atomic<int> ok = 0;
  for (int i = 0; i < 8; ++i) {
    workers.emplace_back([&, i] {
      httplib::Client c("127.0.0.1", port_);
      const std::string label = "Label " + std::to_string(i);
      auto r = c.Patch("/api/segments/tail", json({{"label", label}}).dump(), "application/json");
      if (r && r->status == 200) ++ok;
    });
  }
  for (auto& w : workers) w.join();
  EXPECT_EQ(ok.load(), 8);
  EXPECT_EQ(service_->snapshot().revision, 9u);
}

TEST_F(ServiceTest, Quality) {
  const auto r = get("/api/quality");
  ASSERT_EQ(r->status, 200);
  const auto body = json::parse(r->body);
  EXPECT_EQ(body.at("per_record").size(), 3u);
}

TEST_F(ServiceTest, FilterKeepsUnlocatedOnRequest) {
  const auto none = get("/api/filter?lat=48.1&lon=11.5&max_km=10");
  ASSERT_EQ(none->status, 200) << none->body;
  EXPECT_TRUE(json::parse(none->body).at("segments").empty());
  const auto all = get("/api/filter?lat=48.1&lon=11.5&max_km=10&keep_unlocated=true");
  EXPECT_EQ(json::parse(all->body).at("segments").size(), 3u);
  EXPECT_EQ(get("/api/filter?lat=99&lon=0")->status, 422);
  EXPECT_EQ(get("/api/filter?lon=0")->status, 422);
  EXPECT_EQ(patch("tail", "[1]")->status, 400);
}

TEST_F(ServiceTest, RenderAndAudio) {
  const auto r = get("/api/render?target_ms=200000");
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(r->get_header_value("Content-Type"), "audio/wav");
  const Bytes bytes(r->body.begin(), r->body.end());
  const auto wav = container::parse_container(bytes);
  EXPECT_EQ(wav.find(container::kData)->payload.size() / 2, 8000u * 180 - 80);
  const auto embedded = meta::extract(wav);
  ASSERT_TRUE(embedded);
  EXPECT_EQ(embedded->segments.size(), 2u);

  const auto audio = get("/api/audio/d");
  ASSERT_EQ(audio->status, 200);
  EXPECT_EQ(audio->body.size(), fs::file_size(dir_ / "d.wav"));
  EXPECT_EQ(get("/api/audio/nope")->status, 404);
}

TEST_F(ServiceTest, SaveWritesCurrentState) {
  ASSERT_EQ(patch("tail", R"({"label": "Saved tail"})")->status, 200);
  const auto r = client_->Post("/api/save", "", "application/json");
  ASSERT_EQ(r->status, 200) << r->body;
  const auto saved = load_project(dir_ / "story.xml").project;
  EXPECT_EQ(saved.find_segment("tail")->label, "Saved tail");
}

TEST(ServiceStartup, BadAudioDirFailsFast) {
  ServiceOptions opts;
  opts.project_path = mga::testing::fixture_path("lead_body_tail.xml");
  opts.audio_dir = "/no/such/dir";
  EXPECT_ANY_THROW(Service{opts});
  opts.audio_dir.clear();
  opts.project_path = mga::testing::fixture_path("missing_loi.xml");
  EXPECT_ANY_THROW(Service{opts});
}

}  // namespace
}  // namespace mga::tools
