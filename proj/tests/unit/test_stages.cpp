#include "helpers.hpp"
#include "stylexfer/error.hpp"
#include "stylexfer/hashing.hpp"
#include "stylexfer/stages.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace stylexfer;

namespace {

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    f << s;
}

std::string read_text(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
}

PipelineConfig small_config(const fs::path& out) {
    PipelineConfig c;
    SyntheticRun run;
    run.spec.level = 3;
    run.spec.spots = 2;
    run.seed = 3;
    c.synthetic = run;
    c.transfer.order = 4;
    c.out_dir = out;
    return c;
}

}  // namespace

TEST(Hashing, KnownDigest) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const auto dir = testing_util::scratch_dir("hash");
    write_text(dir / "f", "abc");
    EXPECT_EQ(sha256_file(dir / "f"), sha256_hex("abc"));
    EXPECT_THROW(sha256_file(dir / "none"), IoError);
}

TEST(Cache, HitMissAndTamper) {
    const auto dir = testing_util::scratch_dir("cache");
    write_text(dir / "in.txt", "hello");
    int runs = 0;
    auto fn = [&] {
        ++runs;
        write_text(dir / "out.txt", "derived " + read_text(dir / "in.txt"));
    };
    const Json params = {{"k", 1}};
    const auto first = run_cached("demo", params, {dir / "in.txt"}, {dir / "out.txt"}, true, fn);
    EXPECT_FALSE(first.cache_hit);
    EXPECT_TRUE(fs::exists(stamp_path(dir / "out.txt")));
    const auto second = run_cached("demo", params, {dir / "in.txt"}, {dir / "out.txt"}, true, fn);
    EXPECT_TRUE(second.cache_hit);
    EXPECT_EQ(second.key, first.key);
    EXPECT_EQ(runs, 1);

    // changed params
    EXPECT_FALSE(run_cached("demo", {{"k", 2}}, {dir / "in.txt"}, {dir / "out.txt"}, true, fn).cache_hit);
    // changed input content
    write_text(dir / "in.txt", "world");
    EXPECT_FALSE(run_cached("demo", {{"k", 2}}, {dir / "in.txt"}, {dir / "out.txt"}, true, fn).cache_hit);
    EXPECT_EQ(read_text(dir / "out.txt"), "derived world");
    // tampered output
    write_text(dir / "out.txt", "garbage");
    EXPECT_FALSE(run_cached("demo", {{"k", 2}}, {dir / "in.txt"}, {dir / "out.txt"}, true, fn).cache_hit);
    EXPECT_EQ(read_text(dir / "out.txt"), "derived world");
    // caching off
    EXPECT_FALSE(run_cached("demo", {{"k", 2}}, {dir / "in.txt"}, {dir / "out.txt"}, false, fn).cache_hit);
    EXPECT_EQ(runs, 5);
}

TEST(Cache, ErrorsAreTaggedWithStage) {
    const auto dir = testing_util::scratch_dir("cache_err");
    try {
        run_cached("fit", {}, {}, {dir / "o"}, true, [] { throw NumericalError("singular"); });
        FAIL();
    } catch (const StageError& e) {
        EXPECT_NE(std::string(e.what()).find("[fit]"), std::string::npos);
    }
    try {
        run_cached("map", {}, {}, {dir / "o"}, true, [] { throw IoError("gone"); });
        FAIL();
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("[map]"), std::string::npos);
    }
}

TEST(Meta, PlyCommentsCarryScalars) {
    ArtifactMeta m = make_meta("fit", {{"order", 4}});
    m.fields["seed"] = 7;
    const Json art = m.with(Json{{"x", 1}});
    EXPECT_EQ(art["meta"]["version"], kVersion);
    EXPECT_EQ(art["x"], 1);
    bool seen = false;
    for (const auto& c : m.ply_comments()) {
        EXPECT_EQ(c.find('\n'), std::string::npos);
        if (c.find("seed") != std::string::npos) seen = true;
    }
    EXPECT_TRUE(seen);
}

TEST(RunAll, DeterministicAndCached) {
    const auto root = testing_util::scratch_dir("runall");
    std::ostringstream log1, log2, log3;
    const RunSummary a = run_all(small_config(root / "a"), log1);
    const RunSummary b = run_all(small_config(root / "b"), log2);
    ASSERT_TRUE(a.report.has_value());
    EXPECT_EQ(read_text(a.report_path), read_text(b.report_path));
    EXPECT_EQ(sha256_file(a.result), sha256_file(b.result));
    for (const auto& s : a.stages) EXPECT_FALSE(s.cache_hit) << s.stage;

    const RunSummary again = run_all(small_config(root / "a"), log3);
    for (const auto& s : again.stages) EXPECT_TRUE(s.cache_hit) << s.stage;
    EXPECT_NE(log3.str().find("cache hit"), std::string::npos);
    EXPECT_EQ(read_text(again.report_path), read_text(a.report_path));

    EXPECT_TRUE(fs::exists(root / "a" / "plots"));
    EXPECT_GT(a.report->accuracy_hue, 0.8);
}

TEST(RunAll, ConfigChangeRerunsDownstream) {
    const auto root = testing_util::scratch_dir("runall_change");
    std::ostringstream log;
    run_all(small_config(root), log);
    PipelineConfig c = small_config(root);
    c.transfer.assign.blend_sigma = 1.0;
    const RunSummary r = run_all(c, log);
    bool transfer_rerun = false, map_hit = false;
    for (const auto& s : r.stages) {
        if (s.stage == "transfer") transfer_rerun = !s.cache_hit;
        if (s.stage.rfind("map", 0) == 0) map_hit = s.cache_hit;
    }
    EXPECT_TRUE(transfer_rerun);
    EXPECT_TRUE(map_hit);
}

TEST(Stages, RenderWritesPlots) {
    const auto root = testing_util::scratch_dir("render");
    std::ostringstream log;
    const RunSummary r = run_all(small_config(root / "run"), log);
    RenderInputs in;
    in.result = r.result;
    in.ground_truth = gen_paths(root / "run" / "gen").ground_truth;
    in.matches = root / "run" / "matches.json";
    const auto files = render_files(in, root / "out");
    EXPECT_FALSE(files.empty());
    for (const auto& f : files) EXPECT_TRUE(fs::exists(f)) << f;
}
