#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "dainr/networks/checkpoint.hpp"
#include "dainr/training/pipeline.hpp"

using namespace dainr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "dainr_checkpoint_test";
  fs::create_directories(dir);
  return dir / name;
}

DaInrConfig model_config(bool features) {
  DaInrConfig c;
  c.rows = c.cols = 16;
  c.hash = desk_hash_config();
  c.hidden_width = 32;
  c.hidden_layers = 3;
  c.use_features = features;
  c.seed = 21;
  return c;
}

// Moves every parameter away from its initial value.
template <class Named>
void perturb(const Named& named) {
  int n = 0;
  for (const auto& [name, t] : named) {
    auto handle = t;
    for (auto& v : handle.values()) v += 0.001f * static_cast<float>((n++ % 17) - 8);
  }
}

}  // namespace

TEST(Checkpoint, DaInrRoundTripRendersBitIdentically) {
  for (bool features : {false, true}) {
    DaInrModel<float> model(model_config(features));
    perturb(model.named_parameters());
    FeatureMap<float> fmap;
    if (features) {
      ComplexImage<float> zf(16, 16);
      for (std::size_t i = 0; i < zf.size(); ++i) zf.data[i] = {std::sin(0.3f * i), 0.1f};
      fmap = model.extract_features({zf});
    }
    const auto path = scratch(features ? "features.bin" : "plain.bin");
    save_checkpoint(path, model, {{"frames", 8}, {"canonical_frame", 0}});
    const auto loaded = load_dainr_checkpoint<float>(path);
    const auto* f = features ? &fmap : nullptr;
    for (double t : {0.0, 0.3, -0.7})
      for (double r : {1.0, 2.0}) {
        const auto a = model.render_frame(t, r, f);
        const auto b = loaded.render_frame(t, r, features ? &fmap : nullptr);
        ASSERT_EQ(a.data, b.data) << "t=" << t << " r=" << r;
      }
    const auto [kind, meta] = checkpoint_info(path);
    EXPECT_EQ(kind, "dainr");
    EXPECT_EQ(meta.at("frames"), 8);
  }
}

TEST(Checkpoint, HashInrRoundTripRendersBitIdentically) {
  HashInrConfig c;
  c.rows = c.cols = 16;
  c.frames = 4;
  c.hash = desk_hash_config();
  c.hidden_width = 16;
  c.hidden_layers = 2;
  HashInrModel<float> model(c);
  perturb(model.named_parameters());
  const auto path = scratch("hashinr.bin");
  save_checkpoint(path, model);
  const auto loaded = load_hashinr_checkpoint<float>(path);
  for (int k = 0; k < 4; ++k) ASSERT_EQ(model.render_frame(k).data, loaded.render_frame(k).data);
  EXPECT_THROW(load_dainr_checkpoint<float>(path), IoError);
}

TEST(Checkpoint, HeaderLayout) {
  DaInrModel<float> model(model_config(false));
  const auto path = scratch("layout.bin");
  save_checkpoint(path, model);
  std::ifstream in(path, std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ASSERT_GE(bytes.size(), 20u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 8), "DAINRCKP");
  EXPECT_EQ(bytes[8], 1);
  std::uint64_t header = 0;
  for (int b = 0; b < 8; ++b) header |= static_cast<std::uint64_t>(bytes[12 + b]) << (8 * b);
  std::size_t floats = 0;
  for (const auto& [name, t] : model.named_parameters()) floats += t.numel();
  EXPECT_EQ(bytes.size(), 20 + header + 4 * floats);
  const auto json = nlohmann::json::parse(bytes.begin() + 20, bytes.begin() + 20 + header);
  EXPECT_EQ(json.at("model"), "dainr");
  EXPECT_EQ(json.at("config").at("hash").at("levels"), 8);
}

TEST(Checkpoint, RejectsCorruptFiles) {
  DaInrModel<float> model(model_config(false));
  const auto good = scratch("good.bin");
  save_checkpoint(good, model);
  std::ifstream in(good, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  auto write = [](const fs::path& p, const std::string& data) {
    std::ofstream(p, std::ios::binary) << data;
  };
  const auto bad = scratch("bad.bin");
  std::string wrong_magic = bytes;
  wrong_magic[0] = 'X';
  write(bad, wrong_magic);
  EXPECT_THROW(load_dainr_checkpoint<float>(bad), IoError);

  std::string wrong_version = bytes;
  wrong_version[8] = 7;
  write(bad, wrong_version);
  EXPECT_THROW(load_dainr_checkpoint<float>(bad), IoError);

  write(bad, bytes.substr(0, bytes.size() - 8));
  EXPECT_THROW(load_dainr_checkpoint<float>(bad), IoError);

  EXPECT_THROW(load_dainr_checkpoint<float>(scratch("missing.bin")), IoError);
}
