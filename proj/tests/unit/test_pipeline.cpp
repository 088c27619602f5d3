#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "skintone/config.hpp"
#include "skintone/error.hpp"
#include "skintone/fixtures.hpp"
#include "skintone/manifest.hpp"
#include "skintone/records.hpp"
#include "skintone/report.hpp"
#include "skintone/run.hpp"
#include "test_support.hpp"

using namespace skintone;
using test_support::TempDir;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void touch(const fs::path& p) { std::ofstream(p) << "x"; }

RunConfig small_config(const fs::path& out) {
    RunConfig c;
    c.proxy_size = 64;
    c.out_dir = out;
    c.jobs = 2;
    return c;
}

}  // namespace

TEST(Manifest, ParsesCsv) {
    TempDir dir("pipeline");
    for (auto n : {"a.png", "a_alb.png", "b.png", "c.png", "lm.txt", "sh.json"}) touch(dir.path() / n);
    const std::string csv =
        "id,photo,albedo,landmarks,face_x,face_y,face_w,face_h,sh\n"
        "a,a.png,a_alb.png,lm.txt,1,2,30,40,sh.json\n"
        "b,b.png,,,,,,,\n"
        "c,c.png,,lm.txt,5,5,50,50,\n";
    const auto m = parse_manifest_csv(csv, dir.path());
    ASSERT_EQ(m.rows.size(), 3u);
    EXPECT_EQ(m.rows[0].photo, dir.path() / "a.png");
    EXPECT_EQ(*m.rows[0].face, (FaceBox{1, 2, 30, 40}));
    EXPECT_TRUE(m.rows[0].sh.has_value());
    EXPECT_FALSE(m.rows[1].albedo.has_value());
    EXPECT_FALSE(m.rows[1].face.has_value());
    EXPECT_EQ(m.rows[2].line, 3);
}

TEST(Manifest, ReportsAllProblems) {
    TempDir dir("pipeline");
    touch(dir.path() / "a.png");
    const std::string csv = "id,photo\na,a.png\na,a.png\nb,missing.png\n";
    try {
        parse_manifest_csv(csv, dir.path());
        FAIL();
    } catch (const Error& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("duplicate"), std::string::npos) << msg;
        EXPECT_NE(msg.find("missing.png"), std::string::npos) << msg;
    }
}

TEST(Manifest, JsonForm) {
    TempDir dir("pipeline");
    touch(dir.path() / "a.png");
    const auto m = parse_manifest_json(R"([{"id": "a", "photo": "a.png", "face": [1, 2, 3, 4]}])", dir.path());
    ASSERT_EQ(m.rows.size(), 1u);
    EXPECT_EQ(*m.rows[0].face, (FaceBox{1, 2, 3, 4}));
}

TEST(Config, JsonRoundTripAndHash) {
    RunConfig c;
    c.methods = {Method::TMmm, Method::Cheek};
    c.lightings = {LightingKind::Paramount};
    c.seed = 42;
    c.rendered_roi = RenderedRoi::CentralPatch;
    c.mmm.k = 7;
    const auto back = config_from_json(config_to_json(c));
    EXPECT_EQ(config_to_json(back), config_to_json(c));
    EXPECT_EQ(config_hash(back), config_hash(c));
    EXPECT_EQ(config_hash(c).size(), 16u);

    RunConfig d = c;
    d.jobs = 8;
    d.out_dir = "elsewhere";
    EXPECT_EQ(config_hash(d), config_hash(c));
    d.seed = 43;
    EXPECT_NE(config_hash(d), config_hash(c));
}

TEST(Config, RejectsBadValues) {
    EXPECT_THROW(config_from_json(nlohmann::json{{"methods", {"bogus"}}}), ParseError);
    RunConfig c;
    c.proxy_size = 0;
    EXPECT_THROW(validate_config(c), DataError);
    c = {};
    c.methods.clear();
    EXPECT_THROW(validate_config(c), DataError);
}

TEST(Records, CsvRoundTrip) {
    std::vector<EvalRecord> recs;
    for (int i = 0; i < 5; ++i) {
        const auto ref = make_estimate(Method::TCheek, {0.1 * i + 0.3, 0.4, 1.0 / 3.0}, 100 + i);
        const auto ren = make_estimate(Method::TCheek, {0.2, 0.1 * i + 0.2, 0.25}, 50);
        recs.push_back(make_record("id" + std::to_string(i), RecolorStrategy::Variation, LightingKind::CfdSh, ref, ren,
                                   0.125 * i));
    }
    const auto text = records_to_csv(recs, "abcdef0123456789");
    const auto table = records_from_csv(text);
    EXPECT_EQ(table.config_hash, "abcdef0123456789");
    EXPECT_EQ(records_to_csv(table.records, table.config_hash), text);
    EXPECT_EQ(table.records[3].rendered.mean.g, recs[3].rendered.mean.g);
    EXPECT_THROW(records_from_csv("config_hash,image_id\nx\n"), ParseError);
}

TEST(Run, OneImageGivesAllCells) {
    TempDir dir("pipeline");
    FixtureParams fp;
    fp.count = 1;
    fp.size = 96;
    const auto m = generate_fixtures(dir.path() / "fx", fp);
    const auto r = run_pipeline(m, small_config(dir.path() / "out"));
    EXPECT_EQ(r.ledger.cells.size(), 24u);
    EXPECT_EQ(r.ledger.count(CellStatus::Ok), 24u);
    EXPECT_EQ(r.records.size(), 24u);
    for (auto f : {"records.csv", "ledger.json", "config.json"}) EXPECT_TRUE(fs::exists(dir.path() / "out" / f)) << f;
}

TEST(Run, CacheAndDeterminism) {
    TempDir dir("pipeline");
    FixtureParams fp;
    fp.count = 2;
    fp.size = 96;
    const auto m = generate_fixtures(dir.path() / "fx", fp);
    auto cfg = small_config(dir.path() / "out");
    const auto first = run_pipeline(m, cfg);
    const auto text1 = slurp(dir.path() / "out" / "records.csv");
    EXPECT_EQ(first.ledger.cache_hits(), 0u);
    const auto second = run_pipeline(m, cfg);
    EXPECT_EQ(second.ledger.cache_hits(), 48u);
    EXPECT_EQ(slurp(dir.path() / "out" / "records.csv"), text1);

    cfg.out_dir = dir.path() / "out2";
    cfg.jobs = 1;
    cfg.cache = false;
    run_pipeline(m, cfg);
    EXPECT_EQ(slurp(dir.path() / "out2" / "records.csv"), text1);
}

TEST(Run, MissingInputsSkipOrError) {
    TempDir dir("pipeline");
    FixtureParams fp;
    fp.count = 2;
    fp.size = 96;
    auto m = generate_fixtures(dir.path() / "fx", fp);
    m.rows[0].albedo.reset();
    m.rows[0].sh.reset();
    // A corrupt photo fails its own cells without stopping the run.
    std::ofstream(m.rows[1].photo, std::ios::trunc) << "not a png";
    const auto r = run_pipeline(m, small_config(dir.path() / "out"), false);
    std::size_t skipped = 0, errors = 0, ok = 0;
    for (const auto& c : r.ledger.cells) {
        if (c.image_id == m.rows[0].id) {
            const bool t = c.method == Method::TCheek || c.method == Method::TMmm;
            if (t || c.lighting == LightingKind::CfdSh) {
                EXPECT_EQ(c.status, CellStatus::Skipped);
                ++skipped;
            } else {
                EXPECT_EQ(c.status, CellStatus::Ok) << c.reason;
                ++ok;
            }
        } else {
            EXPECT_EQ(c.status, CellStatus::Error);
            EXPECT_FALSE(c.reason.empty());
            ++errors;
        }
    }
    EXPECT_EQ(skipped, 16u);
    EXPECT_EQ(ok, 8u);
    EXPECT_EQ(errors, 24u);
}

TEST(Run, ClosedLoopRecoversReference) {
    TempDir dir("pipeline");
    FixtureParams fp;
    fp.count = 3;
    fp.size = 128;
    fp.closed_loop = true;
    const auto m = generate_fixtures(dir.path() / "fx", fp);
    auto cfg = load_config(dir.path() / "fx" / "config.json");
    cfg.out_dir = dir.path() / "out";
    cfg.proxy_size = 128;
    const auto r = run_pipeline(m, cfg, false);
    ASSERT_FALSE(r.records.empty());
    for (const auto& rec : r.records) EXPECT_LT(rec.delta_e, 1.0) << rec.image_id << " " << to_string(rec.method);
}

TEST(Report, DeterministicBundle) {
    TempDir dir("pipeline");
    FixtureParams fp;
    fp.count = 3;
    fp.size = 96;
    const auto m = generate_fixtures(dir.path() / "fx", fp);
    run_pipeline(m, small_config(dir.path() / "out"));
    const auto table = read_records(dir.path() / "out" / "records.csv");
    const auto files = write_report(table, dir.path() / "r1");
    write_report(table, dir.path() / "r2");
    EXPECT_GE(files.size(), 10u);
    for (const auto& f : files) EXPECT_EQ(slurp(dir.path() / "r1" / f), slurp(dir.path() / "r2" / f)) << f;
    EXPECT_THROW(write_report(RecordTable{}, dir.path() / "r3"), DataError);

    // Medians in the CSV agree with summarize() over the same group.
    const GroupKey key[] = {GroupKey::Method};
    const auto s = summarize_records(table.records, key, Metric::DeltaE);
    const auto csv = slurp(dir.path() / "r1" / "medians_method.csv");
    for (const auto& g : s) {
        EXPECT_NE(csv.find("," + g.group + "," + std::to_string(g.summary.n) + ","), std::string::npos) << g.group;
    }
}
