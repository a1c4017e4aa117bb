#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "dainr/autodiff/ops.hpp"
#include "dainr/mri/coils.hpp"
#include "dainr/mri/forward_model.hpp"
#include "dainr/mri/ndft.hpp"
#include "dainr/mri/nufft.hpp"
#include "dainr/mri/trajectory.hpp"
#include "test_support.hpp"

using cd = std::complex<double>;
using dainr::ComplexImage;
using dainr::GriddedNufft;
using dainr::Ndft;

namespace {

ComplexImage<double> random_image(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  ComplexImage<double> img(n, n);
  for (auto& v : img.data) v = {dist(gen), dist(gen)};
  return img;
}

std::vector<cd> random_samples(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  std::vector<cd> v(n);
  for (auto& x : v) x = {dist(gen), dist(gen)};
  return v;
}

// Smooth test object: sum of two Gaussian blobs, negligible at the border.
ComplexImage<double> smooth_image(int n) {
  ComplexImage<double> img(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double x = dainr::lattice_coordinate(c, n);
      const double y = dainr::lattice_coordinate(r, n);
      const double a = std::exp(-((x - 0.15) * (x - 0.15) + y * y) / (2 * 0.09));
      const double b = 0.6 * std::exp(-((x + 0.3) * (x + 0.3) + (y - 0.25) * (y - 0.25)) / (2 * 0.02));
      img(r, c) = {a + b, 0.3 * a};
    }
  return img;
}

// Brute-force double loop over pixels for every sample.
std::vector<cd> brute_force_dft(const ComplexImage<double>& img, const dainr::Trajectory& traj) {
  std::vector<cd> out(traj.size());
  for (std::size_t s = 0; s < traj.size(); ++s) {
    cd acc = 0;
    for (int r = 0; r < img.rows; ++r)
      for (int c = 0; c < img.cols; ++c) {
        const double phase = traj.k[s][0] * (c - img.cols / 2) + traj.k[s][1] * (r - img.rows / 2);
        acc += img(r, c) * cd(std::cos(phase), -std::sin(phase));
      }
    out[s] = acc;
  }
  return out;
}

double relative_l2(const std::vector<cd>& a, const std::vector<cd>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

cd inner(const std::vector<cd>& a, const std::vector<cd>& b) {
  cd s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double norm2(const std::vector<cd>& a) { return std::sqrt(std::real(inner(a, a))); }

template <class Op>
double adjoint_mismatch(const Op& op, int n, std::uint64_t seed) {
  auto x = random_image(n, seed);
  auto y = random_samples(op.sample_count(), seed + 1);
  auto ax = op.forward(x);
  auto aty = op.adjoint(y, false);
  const cd lhs = inner(ax, y);
  const cd rhs = inner(x.data, aty.data);
  return std::abs(lhs - rhs) / (norm2(ax) * norm2(y));
}

double psnr_magnitude(const ComplexImage<double>& ref, const ComplexImage<double>& test) {
  double peak = 0, mse = 0;
  for (auto v : ref.data) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = (std::abs(ref.data[i]) - std::abs(test.data[i])) / peak;
    mse += d * d;
  }
  return 10 * std::log10(1.0 / (mse / ref.size()));
}

}  // namespace

TEST(GoldenAngle, FirstSpokesOfFirstFrames) {
  auto f0 = dainr::golden_angle_trajectory(0, 5, 16);
  EXPECT_DOUBLE_EQ(f0.angles[0], 0.0);
  EXPECT_NEAR(f0.angles[1] * 180 / std::numbers::pi, 111.25, 1e-12);
  auto f1 = dainr::golden_angle_trajectory(1, 5, 16);
  EXPECT_NEAR(f1.angles[0] * 180 / std::numbers::pi, 16.25, 1e-12);
  EXPECT_DOUBLE_EQ(dainr::golden_angle_degrees(5), 16.25);
}

TEST(GoldenAngle, ContinuousAcrossFrames) {
  for (int f = 0; f < 20; ++f) {
    auto a = dainr::golden_angle_trajectory(f, 7, 16);
    auto b = dainr::golden_angle_trajectory(f + 1, 7, 16);
    const double last = a.angles.back() * 180 / std::numbers::pi;
    const double next = std::fmod(last + 111.25, 180.0);
    EXPECT_NEAR(b.angles.front() * 180 / std::numbers::pi, next, 1e-9);
  }
}

TEST(GoldenAngle, SpokesCrossCentreWithinBand) {
  auto t = dainr::golden_angle_trajectory(3, 4, 32);
  EXPECT_EQ(t.size(), 4u * 32u);
  for (int j = 0; j < 4; ++j) {
    const auto& centre = t.k[j * 32 + 16];
    EXPECT_EQ(centre[0], 0.0);
    EXPECT_EQ(centre[1], 0.0);
  }
  for (const auto& k : t.k) EXPECT_LE(std::hypot(k[0], k[1]), std::numbers::pi + 1e-12);
  for (double d : t.density) EXPECT_GT(d, 0.0);
  // density grows with |k| away from the centre
  EXPECT_LT(t.density[17], t.density[20]);
}

TEST(GoldenAngle, AccelerationFactorArithmetic) {
  auto round1 = [](double v) { return std::round(v * 10) / 10; };
  EXPECT_DOUBLE_EQ(round1(dainr::acceleration_factor(128, 21)), 6.1);
  EXPECT_DOUBLE_EQ(round1(dainr::acceleration_factor(128, 13)), 9.8);
  EXPECT_DOUBLE_EQ(round1(dainr::acceleration_factor(128, 5)), 25.6);
  EXPECT_DOUBLE_EQ(round1(dainr::acceleration_factor(384, 34)), 11.3);
  EXPECT_THROW(dainr::golden_angle_trajectory(0, 0, 16), dainr::InvalidArgument);
}

TEST(Ndft, CentredImpulseHasUnitMagnitude) {
  ComplexImage<double> img(16, 16);
  img(8, 8) = 1.0;
  auto traj = dainr::golden_angle_trajectory(0, 3, 16);
  for (auto v : Ndft<double>(traj, 16).forward(img)) EXPECT_NEAR(std::abs(v), 1.0, 1e-14);
}

TEST(Ndft, DcSampleIsPixelSum) {
  ComplexImage<double> img(8, 8);
  for (auto& v : img.data) v = 1.0;
  auto traj = dainr::golden_angle_trajectory(0, 1, 8);
  auto s = Ndft<double>(traj, 8).forward(img);
  EXPECT_NEAR(std::abs(s[4] - cd(64.0, 0.0)), 0.0, 1e-12);
}

TEST(Ndft, MatchesBruteForceDft) {
  for (int n : {8, 15, 32}) {
    auto img = random_image(n, 50 + n);
    auto traj = dainr::golden_angle_trajectory(2, 5, n);
    auto fast = Ndft<double>(traj, n).forward(img);
    auto ref = brute_force_dft(img, traj);
    double worst = 0;
    for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(fast[i] - ref[i]));
    EXPECT_LT(worst, 1e-10) << "n=" << n;
  }
}

TEST(Ndft, AdjointIdentity) {
  auto traj = dainr::golden_angle_trajectory(1, 9, 24);
  EXPECT_LT(adjoint_mismatch(Ndft<double>(traj, 24), 24, 60), 1e-10);
}

TEST(Nufft, KernelParameters) {
  dainr::GriddingOptions opts;
  EXPECT_NEAR(opts.kernel_beta(), std::numbers::pi * std::sqrt(8.2), 1e-12);
  EXPECT_EQ(dainr::kaiser_bessel(2.0, 4, 9.0), 1.0);
  EXPECT_EQ(dainr::kaiser_bessel(2.1, 4, 9.0), 0.0);
}

TEST(Nufft, MatchesNdftAtSize64) {
  auto img = random_image(64, 70);
  auto traj = dainr::golden_angle_trajectory(0, 21, 64);
  auto fast = GriddedNufft<double>(traj, 64).forward(img);
  auto exact = Ndft<double>(traj, 64).forward(img);
  EXPECT_LT(relative_l2(fast, exact), 1e-3);
}

TEST(Nufft, MatchesNdftOnOddAndRectangularSizes) {
  auto traj = dainr::golden_angle_trajectory(4, 6, 20);
  ComplexImage<double> img(17, 20);
  std::mt19937 gen(3);
  std::normal_distribution<double> dist;
  for (auto& v : img.data) v = {dist(gen), dist(gen)};
  auto fast = GriddedNufft<double>(traj, 17, 20).forward(img);
  auto exact = Ndft<double>(traj, 17, 20).forward(img);
  EXPECT_LT(relative_l2(fast, exact), 1e-3);
}

TEST(Nufft, AdjointIdentity) {
  auto traj = dainr::golden_angle_trajectory(0, 13, 32);
  EXPECT_LT(adjoint_mismatch(GriddedNufft<double>(traj, 32), 32, 80), 1e-10);
}

TEST(Nufft, AdjointMatchesNdftAdjoint) {
  auto traj = dainr::golden_angle_trajectory(0, 13, 32);
  auto y = random_samples(traj.size(), 81);
  auto a = GriddedNufft<double>(traj, 32).adjoint(y, true);
  auto b = Ndft<double>(traj, 32).adjoint(y, true);
  EXPECT_LT(relative_l2(a.data, b.data), 1e-3);
}

TEST(Nufft, ZeroAndLinearity) {
  auto traj = dainr::golden_angle_trajectory(0, 5, 16);
  GriddedNufft<double> op(traj, 16);
  ComplexImage<double> zero(16, 16);
  for (auto v : op.forward(zero)) EXPECT_EQ(v, cd(0, 0));
  auto back = op.adjoint(std::vector<cd>(traj.size()), true);
  for (auto v : back.data) EXPECT_EQ(v, cd(0, 0));
  auto x = random_image(16, 90);
  auto y = random_image(16, 91);
  const cd a(0.7, -1.2), b(-2.0, 0.3);
  ComplexImage<double> mix(16, 16);
  for (std::size_t i = 0; i < mix.size(); ++i) mix.data[i] = a * x.data[i] + b * y.data[i];
  auto fx = op.forward(x), fy = op.forward(y), fm = op.forward(mix);
  std::vector<cd> want(fx.size());
  for (std::size_t i = 0; i < want.size(); ++i) want[i] = a * fx[i] + b * fy[i];
  EXPECT_LT(relative_l2(fm, want), 1e-10);
}

TEST(Nufft, RegriddingOfFullySampledSmoothObject) {
  auto img = smooth_image(64);
  auto traj = dainr::golden_angle_trajectory(0, 101, 64);
  GriddedNufft<double> op(traj, 64);
  auto recon = op.adjoint(op.forward(img), true);
  EXPECT_GT(psnr_magnitude(img, recon), 30.0);
  auto exact = Ndft<double>(traj, 64);
  auto recon_exact = exact.adjoint(exact.forward(img), true);
  EXPECT_GT(psnr_magnitude(img, recon_exact), 30.0);
}

TEST(Coils, SingleCoilIsUnity) {
  auto maps = dainr::generate_coil_maps<double>(16, 1, 3);
  ASSERT_EQ(maps.count(), 1);
  for (auto v : maps.maps[0].data) {
    EXPECT_NEAR(v.real(), 1.0, 1e-12);
    EXPECT_EQ(v.imag(), 0.0);
  }
}

TEST(Coils, SumOfSquaresIsOne) {
  auto maps = dainr::generate_coil_maps<double>(24, 4, 7);
  for (std::size_t p = 0; p < maps.maps[0].size(); ++p) {
    double s = 0;
    for (const auto& m : maps.maps) s += std::norm(m.data[p]);
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Coils, SeedDeterminesMaps) {
  auto a = dainr::generate_coil_maps<double>(16, 4, 99);
  auto b = dainr::generate_coil_maps<double>(16, 4, 99);
  auto c = dainr::generate_coil_maps<double>(16, 4, 100);
  bool differs = false;
  for (int k = 0; k < 4; ++k)
    for (std::size_t p = 0; p < a.maps[k].size(); ++p) {
      EXPECT_EQ(a.maps[k].data[p], b.maps[k].data[p]);
      differs |= a.maps[k].data[p] != c.maps[k].data[p];
    }
  EXPECT_TRUE(differs);
}

TEST(ForwardModel, UnitCoilEqualsOperator) {
  auto traj = dainr::golden_angle_trajectory(0, 5, 16);
  GriddedNufft<double> op(traj, 16);
  auto img = random_image(16, 100);
  auto one = dainr::unit_coil<double>(16, 16);
  auto m = dainr::forward_model(img, one, op);
  auto direct = op.forward(img);
  ASSERT_EQ(m.size(), 1u);
  for (std::size_t i = 0; i < direct.size(); ++i) EXPECT_EQ(m[0][i], direct[i]);
}

TEST(ForwardModel, ScalesLinearly) {
  auto traj = dainr::golden_angle_trajectory(0, 5, 16);
  GriddedNufft<double> op(traj, 16);
  auto coils = dainr::generate_coil_maps<double>(16, 3, 1);
  auto img = random_image(16, 101);
  auto scaled = img;
  for (auto& v : scaled.data) v *= 2.5;
  auto a = dainr::forward_model(img, coils, op);
  auto b = dainr::forward_model(scaled, coils, op);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < a[c].size(); ++i) EXPECT_NEAR(std::abs(b[c][i] - 2.5 * a[c][i]), 0.0, 1e-10);
}

TEST(ForwardModel, MultiCoilGriddedMatchesNdftOracle) {
  auto traj = dainr::golden_angle_trajectory(3, 13, 64);
  auto coils = dainr::generate_coil_maps<double>(64, 4, 5);
  auto img = random_image(64, 102);
  auto fast = dainr::forward_model(img, coils, GriddedNufft<double>(traj, 64));
  Ndft<double> exact(traj, 64);
  for (int c = 0; c < 4; ++c) {
    ComplexImage<double> weighted(64, 64);
    for (std::size_t p = 0; p < img.size(); ++p) weighted.data[p] = coils.maps[c].data[p] * img.data[p];
    EXPECT_LT(relative_l2(fast[c], exact.forward(weighted)), 1e-3);
  }
}

TEST(ForwardModel, AdjointIdentityAcrossCoils) {
  auto traj = dainr::golden_angle_trajectory(0, 7, 16);
  Ndft<double> op(traj, 16);
  auto coils = dainr::generate_coil_maps<double>(16, 3, 2);
  auto x = random_image(16, 103);
  dainr::CoilSamples<double> y;
  for (int c = 0; c < 3; ++c) y.push_back(random_samples(traj.size(), 104 + c));
  auto ax = dainr::forward_model(x, coils, op);
  auto aty = dainr::forward_model_adjoint(y, coils, op, false);
  cd lhs = 0;
  for (int c = 0; c < 3; ++c) lhs += inner(ax[c], y[c]);
  const cd rhs = inner(x.data, aty.data);
  EXPECT_LT(std::abs(lhs - rhs) / std::abs(lhs), 1e-10);
}

TEST(ForwardModel, L1ResidualGradientThroughOperator) {
  namespace ad = dainr::ad;
  auto traj = dainr::golden_angle_trajectory(0, 3, 6);
  GriddedNufft<double> op(traj, 6);
  auto coils = dainr::generate_coil_maps<double>(6, 2, 4);
  auto pixels = dainr::testing::random_tensor({36, 2}, 105);
  auto target = dainr::testing::random_tensor({2, traj.size(), 2}, 106, -3, 3, false);
  dainr::testing::expect_gradients_match(
      [&](ad::Tape<double>& t) {
        auto y = dainr::forward_model(t, pixels, coils, op);
        return ad::l1_distance(t, y, std::span<const double>(target.values()));
      },
      {pixels}, 1e-7, 1e-5);
}
