#include "helpers.hpp"
#include "stylexfer/config.hpp"
#include "stylexfer/error.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace stylexfer;

namespace fs = std::filesystem;

namespace {

// Minimal valid config plus the given keys.
Json with_paths(Json extra) {
    Json j = {{"source", "s.ply"}, {"target", "t.ply"}};
    j.update(extra);
    return j;
}

void expect_config_error(const Json& j, const std::string& mentions) {
    try {
        config_from_json(j);
        FAIL() << "expected ConfigError for " << j.dump();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find(mentions), std::string::npos) << e.what();
    }
}

}  // namespace

TEST(Config, ShippedDemoLoads) {
    const PipelineConfig c = load_config(fs::path(STYLEXFER_SOURCE_DIR) / "data" / "demo.json");
    ASSERT_TRUE(c.synthetic.has_value());
    EXPECT_EQ(c.synthetic->seed, 7u);
    EXPECT_EQ(c.synthetic->spec.spots, 5);
    EXPECT_EQ(c.synthetic->spec.target_concentration_scale, 0.8);
    EXPECT_EQ(c.transfer.order, 16);
    EXPECT_EQ(c.preset, "paper-similar");
    EXPECT_EQ(c.transfer.assign.mu_s, 1.0);
    EXPECT_EQ(c.transfer.assign.f_s, 0.0);
    EXPECT_TRUE(c.out_dir.is_absolute());
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, EchoRoundTrip) {
    const PipelineConfig c = load_config(fs::path(STYLEXFER_SOURCE_DIR) / "data" / "demo.json");
    const PipelineConfig back = config_from_json(to_json(c));
    EXPECT_EQ(to_json(back), to_json(c));
    EXPECT_EQ(config_hash(back), config_hash(c));
}

TEST(Config, HashIgnoresOutDirAndCache) {
    PipelineConfig a;
    a.source = "s.ply";
    a.target = "t.ply";
    PipelineConfig b = a;
    b.out_dir = "elsewhere";
    b.cache = false;
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.transfer.order = 8;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 64u);
}

TEST(Config, UnknownKeysAreRejected) {
    expect_config_error(with_paths({{"ordr", 16}}), "ordr");
    expect_config_error(with_paths({{"assign", {{"mu", 1.0}}}}), "mu");
    expect_config_error(Json{{"synthetic", {{"spotz", 3}}}}, "spotz");
}

TEST(Config, BadValuesAreRejected) {
    EXPECT_NO_THROW(config_from_json(with_paths(Json::object())));
    expect_config_error(with_paths({{"order", -1}}), "order");
    expect_config_error(with_paths({{"order", "sixteen"}}), "order");
    expect_config_error(with_paths({{"preset", "paper-nothing"}}), "paper-nothing");
    expect_config_error(with_paths({{"assign", {{"blend_sigma", 0.0}}}}), "blend_sigma");
    expect_config_error(with_paths({{"fit", {{"outside", "sometimes"}}}}), "outside");
}

TEST(Config, PresetAndWeightsMustAgree) {
    const Json w = {{"alpha", 0.2}, {"beta", 0.2}, {"gamma", 0.2}, {"delta", 0.35}, {"lambda", 0.05}};
    EXPECT_NO_THROW(config_from_json(with_paths({{"preset", "paper-diffcolor"}, {"weights", w}})));
    expect_config_error(with_paths({{"preset", "paper-similar"}, {"weights", w}}), "preset");
    const PipelineConfig c = config_from_json(with_paths({{"preset", "paper-teaser"}}));
    EXPECT_NEAR(c.transfer.weights.delta, 0.25, 1e-15);
}

TEST(Config, PathsResolveAgainstConfigFile) {
    const auto dir = testing_util::scratch_dir("config");
    {
        std::ofstream f(dir / "c.json");
        f << R"({"source": "in/a.ply", "target": "/abs/b.ply", "out_dir": "run"})";
    }
    const PipelineConfig c = load_config(dir / "c.json");
    EXPECT_EQ(c.source, dir / "in" / "a.ply");
    EXPECT_EQ(c.target, fs::path("/abs/b.ply"));
    EXPECT_EQ(c.out_dir, dir / "run");
}

TEST(Config, MalformedFileIsConfigError) {
    const auto dir = testing_util::scratch_dir("config_bad");
    {
        std::ofstream f(dir / "c.json");
        f << "{ not json";
    }
    EXPECT_THROW(load_config(dir / "c.json"), ConfigError);
    EXPECT_THROW(load_config(dir / "absent.json"), IoError);
}

TEST(Config, MissingInputsFailValidation) {
    PipelineConfig c;
    EXPECT_THROW(c.validate(), ConfigError);
}
