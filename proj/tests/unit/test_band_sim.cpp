#include "msunmix/band_sim.hpp"
#include "msunmix/error.hpp"
#include "msunmix/io.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace msunmix;

namespace {

Spectrum ones(const WavelengthAxis& axis) {
  return Spectrum(axis, Vector::Ones(static_cast<Eigen::Index>(axis.size())));
}

SensitivityChannel channel_on(const WavelengthAxis& axis, Vector response,
                              BandKind kind = BandKind::selective) {
  return SensitivityChannel::make("c", axis, std::move(response), kind);
}

SensitivityModel random_camera(Rng& rng, std::size_t channels, double lo, double hi) {
  SensitivityModel m;
  const auto axis = WavelengthAxis::uniform(lo, hi, 61);
  for (std::size_t c = 0; c < channels; ++c) {
    const double center = lo + (hi - lo) * (static_cast<double>(c) + 0.5) / static_cast<double>(channels);
    Vector r(61);
    for (Eigen::Index k = 0; k < 61; ++k) {
      r[k] = std::max(0.0, 1.0 - std::abs(axis[static_cast<std::size_t>(k)] - center) / 80.0) *
             rng.uniform(0.5, 1.0);
    }
    r[static_cast<Eigen::Index>(c % 61)] += 0.01;
    m.channels.push_back(SensitivityChannel::make("ch" + std::to_string(c), axis, r));
  }
  return m;
}

// Integral of the piecewise-linear interpolant of f over [x0, xn] by a fine
// midpoint rule, independent of the library's quadrature.
double fine_riemann(const std::vector<double>& x, const std::vector<double>& f, int per_interval) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double h = (x[k + 1] - x[k]) / per_interval;
    for (int i = 0; i < per_interval; ++i) {
      const double t = (i + 0.5) / per_interval;
      total += h * ((1.0 - t) * f[k] + t * f[k + 1]);
    }
  }
  return total;
}

}  // namespace

TEST(Resample, IdentityOnSameAxis) {
  const auto axis = WavelengthAxis::uniform(400.0, 1000.0, 13);
  Rng rng(1);
  const auto c = channel_on(axis, test::random_matrix(rng, 13, 1, 0.1, 1.0));
  const auto r = resample(c, axis);
  EXPECT_EQ(r.response, c.response);
}

TEST(Resample, MidpointOfLine) {
  Vector v(2);
  v << 0.0, 1.0;
  const auto c = channel_on(WavelengthAxis({400.0, 500.0}), v);
  const auto r = resample(c, WavelengthAxis({450.0}));
  EXPECT_DOUBLE_EQ(r.response[0], 0.5);
}

TEST(Resample, OutsideSupportIsZero) {
  const auto c = channel_on(WavelengthAxis({400.0, 2500.0}), Vector::Ones(2));
  const auto r = resample(c, WavelengthAxis({300.0, 2500.0, 2600.0}));
  EXPECT_EQ(r.response[0], 0.0);
  EXPECT_EQ(r.response[1], 1.0);
  EXPECT_EQ(r.response[2], 0.0);
}

TEST(Resample, DegenerateSourceAxisRejected) {
  const auto c = channel_on(WavelengthAxis({400.0}), Vector::Ones(1));
  EXPECT_THROW(resample(c, WavelengthAxis({400.0, 500.0})), InvalidArgument);
}

TEST(Resample, ExactOnPiecewiseLinearInputs) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto src = WavelengthAxis::uniform(400.0, 1000.0, 2 + rng.below(12));
    const Vector vals = test::random_matrix(rng, static_cast<Eigen::Index>(src.size()), 1, 0.0, 1.0) +
                        Vector::Constant(static_cast<Eigen::Index>(src.size()), 0.01);
    const auto c = channel_on(src, vals);
    std::vector<double> xs;
    for (int i = 0; i < 40; ++i) xs.push_back(400.0 + 600.0 * (i + rng.uniform()) / 40.0);
    const auto r = resample(c, WavelengthAxis(xs));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      // The line through the two bracketing source samples.
      std::size_t k = 0;
      while (k + 2 < src.size() && src[k + 1] < xs[i]) ++k;
      const double t = (xs[i] - src[k]) / (src[k + 1] - src[k]);
      const double expected = (1 - t) * vals[static_cast<Eigen::Index>(k)] +
                              t * vals[static_cast<Eigen::Index>(k + 1)];
      EXPECT_NEAR(r.response[static_cast<Eigen::Index>(i)], expected, 1e-14);
    }
  }
}

TEST(IntegrateChannel, UnitProductOverRange) {
  const auto axis = WavelengthAxis::uniform(400.0, 1000.0, 61);
  const auto c = channel_on(axis, Vector::Ones(61));
  EXPECT_NEAR(integrate_channel(ones(axis), ones(axis), c), 600.0, 1e-9);
}

TEST(IntegrateChannel, ZeroReflectance) {
  const auto axis = WavelengthAxis::uniform(400.0, 1000.0, 7);
  const auto c = channel_on(axis, Vector::Ones(7));
  EXPECT_EQ(integrate_channel(Spectrum(axis, Vector::Zero(7)), ones(axis), c), 0.0);
}

TEST(IntegrateChannel, MatchesFineRiemannOracle) {
  const WavelengthAxis axis({400.0, 450.0, 520.0, 600.0, 700.0});
  Vector r(5), s(5), i(5);
  r << 0.2, 0.6, 0.4, 0.9, 0.3;  // piecewise linear
  s << 0.0, 0.5, 1.0, 0.5, 0.0;  // triangular
  i << 1.0, 1.2, 0.8, 1.1, 0.9;
  const double y = integrate_channel(Spectrum(axis, r), Spectrum(axis, i), channel_on(axis, s));
  std::vector<double> x(axis.samples().begin(), axis.samples().end()), f;
  for (Eigen::Index k = 0; k < 5; ++k) f.push_back(r[k] * s[k] * i[k]);
  EXPECT_LE(test::rel_diff(y, fine_riemann(x, f, 20000)), 1e-9);
}

TEST(IntegrateChannel, RejectsAxisMismatch) {
  const auto axis = WavelengthAxis::uniform(400.0, 1000.0, 7);
  const auto other = WavelengthAxis::uniform(400.0, 1000.0, 8);
  EXPECT_THROW(integrate_channel(ones(axis), ones(axis), channel_on(other, Vector::Ones(8))),
               InvalidArgument);
}

TEST(IntegrateChannel, RestrictsToChannelSupport) {
  // Channel measured on 500..700 only; resampled onto 400..1000.
  const auto axis = WavelengthAxis::uniform(400.0, 1000.0, 61);
  const auto c = resample(channel_on(WavelengthAxis({500.0, 700.0}), Vector::Ones(2)), axis);
  EXPECT_NEAR(integrate_channel(ones(axis), ones(axis), c), 200.0, 1e-9);
}

TEST(SimulateCube, EmptyOverlapIsAnError) {
  const auto axis = WavelengthAxis::uniform(400.0, 2500.0, 30);
  SensitivityModel cam;
  cam.channels.push_back(channel_on(WavelengthAxis({3000.0, 3500.0}), Vector::Ones(2)));
  const SpectralCube cube(1, 1, axis, Matrix::Ones(30, 1));
  try {
    simulate_cube(cube, cam);
    FAIL() << "expected an error";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("empty overlap"), std::string::npos);
  }
}

TEST(SimulateCube, RealCameraGivesNineBandsWithOnePanchromatic) {
  const auto cam = io::read_curves(test::data_path("cameras/real_camera.csv"));
  const auto axis = WavelengthAxis::uniform(400.0, 2500.0, 198);
  Rng rng(2);
  const SpectralCube cube(10, 10, axis, test::random_matrix(rng, 198, 100));
  const auto out = simulate_cube(cube, cam);
  EXPECT_EQ(out.band_count(), 9u);
  EXPECT_EQ(out.width(), 10u);
  EXPECT_EQ(out.height(), 10u);
  int pan = 0;
  for (std::size_t b = 0; b < out.band_count(); ++b) pan += out.axis().kind(b) == BandKind::panchromatic;
  EXPECT_EQ(pan, 1);
}

TEST(SimulateCube, RealCameraOnVisibleNirInput) {
  const auto cam = io::read_curves(test::data_path("cameras/real_camera.csv"));
  const auto axis = WavelengthAxis::uniform(400.0, 1000.0, 186);
  const SpectralCube cube(2, 2, axis, Matrix::Constant(186, 4, 0.5));
  const auto out = simulate_cube(cube, cam);
  EXPECT_EQ(out.band_count(), 9u);
  EXPECT_GT(out.data().minCoeff(), 0.0);
}

TEST(SimulateCube, SyntheticCameraGivesFourteenBands) {
  const auto cam = io::read_curves(test::data_path("cameras/synthetic_camera.csv"));
  const auto axis = WavelengthAxis::uniform(400.0, 2500.0, 198);
  const SpectralCube cube(3, 2, axis, Matrix::Constant(198, 6, 0.3));
  const auto out = simulate_cube(cube, cam);
  EXPECT_EQ(out.band_count(), 14u);
  EXPECT_FALSE(out.axis().has_panchromatic());
}

TEST(SimulateCube, SinglePixelSingleChannelReducesToIntegral) {
  const auto axis = WavelengthAxis::uniform(400.0, 1000.0, 31);
  Rng rng(8);
  const Vector r = test::random_matrix(rng, 31, 1);
  Vector s = Vector::Zero(31);
  s.segment(10, 8).setOnes();
  SensitivityModel cam;
  cam.channels.push_back(channel_on(axis, s));
  const auto out = simulate_cube(SpectralCube(1, 1, axis, r), cam);
  ASSERT_EQ(out.band_count(), 1u);
  EXPECT_DOUBLE_EQ(out.data()(0, 0), integrate_channel(Spectrum(axis, r), ones(axis), cam.channels[0]));
}

TEST(SimulateCube, OutputAxisIsChannelCentroid) {
  const auto axis = WavelengthAxis::uniform(400.0, 1000.0, 61);
  Vector s = Vector::Zero(61);
  s[20] = 1.0;  // 600 nm spike
  SensitivityModel cam;
  cam.channels.push_back(channel_on(axis, s));
  const auto out = simulate_cube(SpectralCube(1, 1, axis, Matrix::Ones(61, 1)), cam);
  EXPECT_NEAR(out.axis()[0], 600.0, 1e-9);
}

TEST(SimulateCube, IlluminationScalesOutput) {
  const auto cam0 = io::read_curves(test::data_path("cameras/synthetic_camera.csv"));
  auto cam2 = cam0;
  cam2.illumination = Spectrum(WavelengthAxis({350.0, 2600.0}), Vector::Constant(2, 2.0));
  const auto axis = WavelengthAxis::uniform(400.0, 2500.0, 198);
  Rng rng(4);
  const SpectralCube cube(2, 2, axis, test::random_matrix(rng, 198, 4));
  const Matrix a = simulate_cube(cube, cam0).data();
  const Matrix b = simulate_cube(cube, cam2).data();
  EXPECT_LE((b - 2.0 * a).cwiseAbs().maxCoeff(), 1e-12 * a.cwiseAbs().maxCoeff());
}

TEST(SimulateCube, NormalizedUnitReflectanceIsOne) {
  const auto cam = io::read_curves(test::data_path("cameras/synthetic_camera.csv"));
  const auto axis = WavelengthAxis::uniform(400.0, 2500.0, 198);
  const auto out = simulate_cube(SpectralCube(1, 1, axis, Matrix::Ones(198, 1)), cam, {true});
  for (Eigen::Index b = 0; b < 14; ++b) EXPECT_NEAR(out.data()(b, 0), 1.0, 1e-12);
}

TEST(SimulateCube, LinearInReflectance) {
  Rng rng(21);
  const auto axis = WavelengthAxis::uniform(400.0, 2500.0, 120);
  for (int trial = 0; trial < 30; ++trial) {
    const auto cam = random_camera(rng, 1 + rng.below(10), 400.0, 2500.0);
    const Matrix r1 = test::random_matrix(rng, 120, 5);
    const Matrix r2 = test::random_matrix(rng, 120, 5);
    const double a = rng.uniform(0.0, 2.0);
    const double b = rng.uniform(0.0, 2.0);
    const Matrix lhs = simulate_cube(SpectralCube(5, 1, axis, a * r1 + b * r2), cam).data();
    const Matrix rhs = a * simulate_cube(SpectralCube(5, 1, axis, r1), cam).data() +
                       b * simulate_cube(SpectralCube(5, 1, axis, r2), cam).data();
    for (Eigen::Index i = 0; i < lhs.size(); ++i) {
      EXPECT_LE(test::rel_diff(lhs.data()[i], rhs.data()[i]), 1e-12);
    }
  }
}

TEST(SimulateCube, MonotoneInReflectance) {
  Rng rng(22);
  const auto axis = WavelengthAxis::uniform(400.0, 2500.0, 120);
  for (int trial = 0; trial < 30; ++trial) {
    const auto cam = random_camera(rng, 1 + rng.below(10), 400.0, 2500.0);
    const Matrix r1 = test::random_matrix(rng, 120, 4);
    const Matrix r2 = r1 + test::random_matrix(rng, 120, 4);
    const Matrix y1 = simulate_cube(SpectralCube(4, 1, axis, r1), cam).data();
    const Matrix y2 = simulate_cube(SpectralCube(4, 1, axis, r2), cam).data();
    EXPECT_TRUE((y1.array() <= y2.array()).all());
  }
}

TEST(SimulateEndmembers, CommutesWithMixing) {
  const auto cam = io::read_curves(test::data_path("cameras/real_camera.csv"));
  const auto axis = WavelengthAxis::uniform(400.0, 2500.0, 198);
  Rng rng(9);
  const EndmemberSet e(axis, test::random_matrix(rng, 198, 4));
  const Vector f = test::random_simplex_point(rng, 4);
  const std::span<const double> fs(f.data(), 4);
  const Spectrum mixed = mix(e, fs);
  const Matrix lhs = simulate_cube(SpectralCube(1, 1, axis, mixed.values()), cam).data();
  const Vector rhs = mix(simulate_endmembers(e, cam), fs).values();
  for (Eigen::Index b = 0; b < rhs.size(); ++b) EXPECT_LE(test::rel_diff(lhs(b, 0), rhs[b]), 1e-12);
}

TEST(SimulatedLayout, SortsBandsByCentroid) {
  const auto axis = WavelengthAxis::uniform(400.0, 1000.0, 61);
  Vector hi = Vector::Zero(61), lo = Vector::Zero(61);
  hi[50] = 1.0;
  lo[10] = 1.0;
  SensitivityModel cam;
  cam.channels.push_back(SensitivityChannel::make("long", axis, hi));
  cam.channels.push_back(SensitivityChannel::make("short", axis, lo));
  const auto layout = simulated_layout(cam);
  EXPECT_EQ(layout.channel_of_band, (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(layout.band_names, (std::vector<std::string>{"short", "long"}));
  EXPECT_LT(layout.axis[0], layout.axis[1]);
}

TEST(SensitivityChannel, RejectsInvalidResponse) {
  const WavelengthAxis axis({400.0, 500.0});
  EXPECT_THROW(SensitivityChannel::make("z", axis, Vector::Zero(2)), InvalidArgument);
  EXPECT_THROW(SensitivityChannel::make("n", axis, Vector::Constant(2, -1.0)), InvalidArgument);
  EXPECT_THROW(SensitivityChannel::make("l", axis, Vector::Ones(3)), InvalidArgument);
}
