#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "dainr/baselines/hashinr.hpp"
#include "dainr/baselines/regularizers.hpp"
#include "dainr/baselines/zero_filled.hpp"
#include "dainr/phantom/dataset.hpp"
#include "test_support.hpp"

namespace ad = dainr::ad;
using dainr::ImageSequence;

namespace {

ImageSequence<double> random_sequence(int frames, int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  ImageSequence<double> seq(frames, n, n);
  for (auto& f : seq.frames)
    for (auto& v : f.data) v = {dist(gen), dist(gen)};
  return seq;
}

ad::Tensor<double> stack(const ImageSequence<double>& seq, bool grad = true) {
  std::vector<double> v;
  for (const auto& f : seq.frames)
    for (auto p : f.data) {
      v.push_back(p.real());
      v.push_back(p.imag());
    }
  return ad::Tensor<double>::from({v.size() / 2, 2}, v, grad);
}

// Sum of singular values as sqrt of the eigenvalues of the Gram matrix X^H X.
double gram_nuclear_norm(const ImageSequence<double>& seq) {
  const int t = seq.size();
  Eigen::MatrixXcd gram(t, t);
  for (int a = 0; a < t; ++a)
    for (int b = 0; b < t; ++b) {
      std::complex<double> s = 0;
      for (std::size_t p = 0; p < seq[a].size(); ++p) s += std::conj(seq[a].data[p]) * seq[b].data[p];
      gram(a, b) = s;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
  double total = 0;
  for (int i = 0; i < t; ++i) total += std::sqrt(std::max(0.0, eig.eigenvalues()(i)));
  return total;
}

double psnr(const dainr::ComplexImage<double>& ref, const dainr::ComplexImage<double>& test) {
  double peak = 0, mse = 0;
  for (auto v : ref.data) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = (std::abs(ref.data[i]) - std::abs(test.data[i])) / peak;
    mse += d * d;
  }
  return 10 * std::log10(ref.size() / mse);
}

}  // namespace

TEST(TemporalTv, ConstantSequenceIsZero) {
  auto seq = random_sequence(1, 4, 1);
  seq.frames.push_back(seq[0]);
  seq.frames.push_back(seq[0]);
  EXPECT_EQ(dainr::temporal_tv(seq), 0.0);
}

TEST(TemporalTv, TwoPixelExample) {
  ImageSequence<double> seq(2, 1, 1);
  seq[1](0, 0) = {3.0, 4.0};
  EXPECT_EQ(dainr::temporal_tv(seq), 5.0);
  ImageSequence<double> single(1, 2, 2);
  EXPECT_THROW(dainr::temporal_tv(single), dainr::InvalidArgument);
}

TEST(TemporalTv, NonNegativeUnderPermutation) {
  auto seq = random_sequence(5, 3, 2);
  std::mt19937 gen(1);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(seq.frames.begin(), seq.frames.end(), gen);
    const double v = dainr::temporal_tv(seq);
    EXPECT_GT(v, 0.0);
    EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(TemporalTv, TapeValueAndGradient) {
  auto seq = random_sequence(4, 3, 3);
  auto x = stack(seq);
  ad::Tape<double> tape;
  EXPECT_NEAR(ad::temporal_tv(tape, x, 4).item(), dainr::temporal_tv(seq), 1e-12);
  dainr::testing::expect_gradients_match(
      [&](ad::Tape<double>& t) { return ad::temporal_tv(t, x, 4); }, {x}, 1e-7, 1e-5);
}

TEST(NuclearNorm, RankOneSequence) {
  const int n = 6, t = 5;
  auto u = random_sequence(1, n, 4)[0];
  std::vector<std::complex<double>> c{{1, 2}, {-0.5, 0}, {0, 3}, {2, -1}, {0.25, 0.25}};
  ImageSequence<double> seq(t, n, n);
  double nu = 0, nc = 0;
  for (auto v : u.data) nu += std::norm(v);
  for (auto v : c) nc += std::norm(v);
  for (int k = 0; k < t; ++k)
    for (std::size_t p = 0; p < u.size(); ++p) seq[k].data[p] = c[k] * u.data[p];
  EXPECT_NEAR(dainr::nuclear_norm(seq), std::sqrt(nu) * std::sqrt(nc), 1e-10);
}

TEST(NuclearNorm, ZeroSequence) {
  ImageSequence<double> seq(3, 4, 4);
  EXPECT_EQ(dainr::nuclear_norm(seq), 0.0);
}

TEST(NuclearNorm, MatchesGramEigenOracle) {
  for (std::uint64_t seed : {5, 6, 7}) {
    auto seq = random_sequence(4, 8, seed);
    EXPECT_NEAR(dainr::nuclear_norm(seq), gram_nuclear_norm(seq), 1e-8);
  }
}

TEST(NuclearNorm, UnitaryInvariance) {
  auto seq = random_sequence(4, 5, 8);
  const double base = dainr::nuclear_norm(seq);
  // Random orthogonal 4x4 mixing across frames.
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(4, 4);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  ImageSequence<double> mixed(4, 5, 5);
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k)
      for (std::size_t p = 0; p < seq[0].size(); ++p) mixed[j].data[p] += q(k, j) * seq[k].data[p];
  EXPECT_NEAR(dainr::nuclear_norm(mixed), base, 1e-8 * base);
  // Orthogonal mixing over pixels: a permutation with sign flips.
  ImageSequence<double> permuted(4, 5, 5);
  for (int k = 0; k < 4; ++k)
    for (std::size_t p = 0; p < seq[k].size(); ++p)
      permuted[k].data[(p * 7) % 25] = (p % 2 ? -1.0 : 1.0) * seq[k].data[p];
  EXPECT_NEAR(dainr::nuclear_norm(permuted), base, 1e-8 * base);
}

TEST(NuclearNorm, SubgradientMatchesFiniteDifferences) {
  auto seq = random_sequence(3, 4, 9);
  auto x = stack(seq);
  dainr::testing::expect_gradients_match(
      [&](ad::Tape<double>& t) { return ad::nuclear_norm(t, x, 3); }, {x}, 1e-6, 1e-4);
}

TEST(ZeroFilled, FullySampledPhantomAndStreakingAtFewSpokes) {
  const int n = 64;
  auto gt = dainr::generate_phantom(dainr::cardiac_phantom(n, 2));
  auto coils = dainr::generate_coil_maps<double>(n, 4, 1);
  dainr::SimulationOptions full;
  full.spokes_per_frame = n;
  auto acq_full = dainr::retrospective_undersample(gt, coils, full);
  auto zf_full = dainr::zero_filled_recon(acq_full, coils);
  const double psnr_full = psnr(gt[0], zf_full[0]);
  EXPECT_GT(psnr_full, 30.0);
  dainr::SimulationOptions few;
  few.spokes_per_frame = 5;
  auto acq_few = dainr::retrospective_undersample(gt, coils, few);
  auto zf_few = dainr::zero_filled_recon(acq_few, coils);
  EXPECT_LT(psnr(gt[0], zf_few[0]), psnr_full - 5.0);
}

TEST(ZeroFilled, ZeroDataAndLinearity) {
  const int n = 16;
  auto coils = dainr::generate_coil_maps<double>(n, 2, 2);
  auto gt = random_sequence(2, n, 10);
  dainr::SimulationOptions opts;
  opts.spokes_per_frame = 5;
  auto acq = dainr::retrospective_undersample(gt, coils, opts);
  auto zero = acq;
  for (auto& f : zero.samples)
    for (auto& c : f)
      for (auto& v : c) v = 0;
  auto zf = dainr::zero_filled_recon(zero, coils);
  for (auto v : zf[0].data) EXPECT_EQ(v, std::complex<double>(0, 0));
  auto doubled = acq;
  for (auto& f : doubled.samples)
    for (auto& c : f)
      for (auto& v : c) v *= 2.0;
  auto a = dainr::zero_filled_recon(acq, coils);
  auto b = dainr::zero_filled_recon(doubled, coils);
  for (std::size_t p = 0; p < a[1].size(); ++p) EXPECT_NEAR(std::abs(b[1].data[p] - 2.0 * a[1].data[p]), 0.0, 1e-10);
  // Without maps: root sum of squares magnitude.
  auto sos = dainr::zero_filled_recon(acq, dainr::CoilSensitivities<double>{});
  for (auto v : sos[0].data) EXPECT_GE(v.real(), 0.0);
}

namespace {

struct SmallProblem {
  ImageSequence<double> gt;
  dainr::ReconstructionProblem<double> problem;
};

SmallProblem small_problem(int n, int frames, int coils, int spokes) {
  SmallProblem s;
  s.gt = dainr::generate_phantom(dainr::cardiac_phantom(n, frames));
  auto maps = dainr::generate_coil_maps<double>(n, coils, 3);
  dainr::SimulationOptions opts;
  opts.spokes_per_frame = spokes;
  opts.op = dainr::OperatorKind::gridded;
  auto acq = dainr::retrospective_undersample(s.gt, maps, opts);
  s.problem = dainr::make_problem(acq, maps);
  return s;
}

dainr::HashInrConfig small_hashinr(int n, int frames) {
  dainr::HashInrConfig cfg;
  cfg.rows = cfg.cols = n;
  cfg.frames = frames;
  cfg.hash.levels = 4;
  cfg.hash.min_resolution = 4;
  cfg.hash.max_resolution = 16;
  cfg.hash.table_size = 1 << 12;
  cfg.hidden_width = 16;
  cfg.hidden_layers = 2;
  cfg.seed = 1;
  return cfg;
}

}  // namespace

TEST(HashInr, ZeroWeightsUseDataTermOnly) {
  auto s = small_problem(8, 3, 2, 3);
  dainr::HashInrModel<double> model(small_hashinr(8, 3));
  dainr::TrainConfig cfg;
  cfg.iterations = 1;
  auto r = dainr::hashinr_optimize(model, s.problem, {}, cfg);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].frame, 0);
  // Loss equals the squared data term of the initial render of frame 0.
  dainr::HashInrModel<double> fresh(small_hashinr(8, 3));
  auto img = fresh.render_frame(0);
  auto pred = dainr::forward_model(img, s.problem.coils, *s.problem.ops[0]);
  auto flat = dainr::interleave(pred);
  double ref = 0;
  for (std::size_t i = 0; i < flat.size(); ++i) ref += std::pow(flat[i] - s.problem.targets[0][i], 2);
  EXPECT_NEAR(r.trace[0].loss, ref, 1e-9 * ref);
}

TEST(HashInr, PerfectFitHasZeroDataTerm) {
  auto s = small_problem(8, 2, 2, 3);
  ad::Tape<double> tape;
  std::vector<double> v;
  for (auto p : s.gt[1].data) {
    v.push_back(p.real());
    v.push_back(p.imag());
  }
  auto pixels = ad::Tensor<double>::from({64, 2}, v, true);
  auto loss = dainr::squared_data_term(tape, pixels, s.problem.coils, *s.problem.ops[1],
                                       std::span<const double>(s.problem.targets[1]));
  EXPECT_LT(loss.item(), 1e-20);
}

TEST(HashInr, TemporalTvWeightLowersTemporalVariation) {
  auto s = small_problem(12, 4, 2, 4);
  dainr::TrainConfig cfg;
  cfg.iterations = 150;
  cfg.optimizer.lr = 1e-2;
  cfg.early_stop = false;
  dainr::HashInrModel<double> plain(small_hashinr(12, 4));
  dainr::HashInrModel<double> smooth(small_hashinr(12, 4));
  // Run both jointly (all frames per step) so only the weight differs.
  dainr::hashinr_optimize(plain, s.problem, {1e-12, 0.0}, cfg);
  dainr::hashinr_optimize(smooth, s.problem, {2.0, 0.0}, cfg);
  EXPECT_LT(dainr::temporal_tv(smooth.render_sequence()), dainr::temporal_tv(plain.render_sequence()));
}

TEST(HashInr, LowRankTermRunsAndStaysFinite) {
  auto s = small_problem(8, 3, 2, 3);
  dainr::HashInrModel<double> model(small_hashinr(8, 3));
  dainr::TrainConfig cfg;
  cfg.iterations = 5;
  auto r = dainr::hashinr_optimize(model, s.problem, {0.0, 0.5}, cfg);
  EXPECT_EQ(r.trace.front().frame, -1);
  for (const auto& rec : r.trace) EXPECT_TRUE(std::isfinite(rec.loss));
}
