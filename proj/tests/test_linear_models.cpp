#include "phdyn/linear_models.hpp"

#include <doctest.h>

#include <cmath>

using namespace phdyn;
using namespace phdyn::linear;

namespace {

const IntegerMatrix kDA({{1, 1, 0}, {0, 0, 1}, {1, 0, 0}});
const IntegerMatrix kCat({{2, 1}, {1, 1}});

// Real root of λ³ − λ² − 1 by plain Newton from 1.5.
double da_real_root() {
  double x = 1.5;
  for (int i = 0; i < 60; ++i) x -= (x * x * x - x * x - 1) / (3 * x * x - 2 * x);
  return x;
}

}  // namespace

TEST_CASE("integer matrices reject |det| != 1") {
  CHECK_THROWS_AS(IntegerMatrix({{2, 0}, {0, 1}}), InputError);
  CHECK_THROWS_AS(IntegerMatrix({{1, 2}, {3}}), InputError);
  CHECK(kCat.det() == 1);
  CHECK((kCat * kCat.inverse()).is_identity());
}

TEST_CASE("characteristic polynomials") {
  CHECK(char_poly(kDA) == std::vector<long long>{1, 0, 1, -1});
  CHECK(char_poly(IntegerMatrix::identity(2)) == std::vector<long long>{1, -2, 1});
  CHECK(char_poly(kCat) == std::vector<long long>{1, -3, 1});
  for (const auto& m : {kDA, kCat}) {
    const auto sd = spectral_classify(m);
    const auto c = char_poly(m);
    for (auto z : sd.eigenvalues) {
      std::complex<double> v = 0.0;
      for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) v = v * z + static_cast<double>(c[k]);
      CHECK(std::abs(v) < 1e-8);
    }
  }
}

TEST_CASE("DA base matrix classification") {
  const auto sd = spectral_classify(kDA);
  CHECK(sd.classification == SpectralClass::anosov_complex_pair);
  const double r = da_real_root();
  CHECK(std::abs(sd.eigenvalues[2].real() - r) < 1e-12);
  CHECK(std::abs(sd.moduli[0] - 1.0 / std::sqrt(r)) < 1e-12);
  CHECK(std::abs(sd.moduli[0] - 0.826031) < 1e-6);
  CHECK(sd.irreducible_over_rationals);
  CHECK(std::abs(sd.moduli[0] * sd.moduli[1] * sd.moduli[2] - 1.0) < 1e-10);
}

TEST_CASE("cat map and identity") {
  const auto sd = spectral_classify(kCat);
  CHECK(sd.classification == SpectralClass::anosov_real);
  CHECK(std::abs(sd.eigenvalues[0].real() - (3 - std::sqrt(5.0)) / 2) < 1e-12);
  CHECK(std::abs(sd.eigenvalues[1].real() - (3 + std::sqrt(5.0)) / 2) < 1e-12);
  CHECK(spectral_classify(IntegerMatrix::identity(2)).classification == SpectralClass::non_partially_hyperbolic);
  CHECK_THROWS_AS(invariant_splitting(spectral_classify(IntegerMatrix::identity(2)), IntegerMatrix::identity(2)),
                  InputError);
}

TEST_CASE("powers keep the anosov verdict") {
  for (const auto& m : {kDA, kCat}) {
    const bool a = to_string(spectral_classify(m).classification).rfind("anosov", 0) == 0;
    for (const auto& mk : {m * m, m * m * m})
      CHECK((to_string(spectral_classify(mk).classification).rfind("anosov", 0) == 0) == a);
  }
}

TEST_CASE("splitting projector algebra and invariance") {
  const IntegerMatrix center({{1, 0, 0}, {0, 2, 1}, {0, 1, 1}});
  for (const auto& m : {kDA, kCat, center}) {
    const auto sd = spectral_classify(m);
    const auto sp = invariant_splitting(sd, m);
    const Mat A = m.to_real();
    const int d = m.dim();
    Mat sum = Mat::Zero(d, d);
    for (const auto& [la, sa] : sp.subspaces) {
      const Mat& P = sa.projector;
      CHECK((P * P - P).cwiseAbs().maxCoeff() < 1e-10);
      sum += P;
      for (const auto& [lb, sb] : sp.subspaces)
        if (la != lb) CHECK((P * sb.projector).cwiseAbs().maxCoeff() < 1e-10);
      // A maps the subspace into itself: the image has no component off it.
      const Mat B = sa.basis;
      const Mat img = A * B;
      CHECK((img - B * (B.transpose() * img)).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((B.transpose() * B - Mat::Identity(B.cols(), B.cols())).cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK((sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("cat map eigenlines") {
  const auto sp = invariant_splitting(spectral_classify(kCat), kCat);
  const Vec s = sp.at(Label::stable).basis.col(0), u = sp.at(Label::unstable).basis.col(0);
  // Oracle: (2 − λ)x + y = 0 gives the eigenvector (1, λ − 2).
  Vec es(2), eu(2);
  es << 1, (3 - std::sqrt(5.0)) / 2 - 2;
  eu << 1, (3 + std::sqrt(5.0)) / 2 - 2;
  CHECK(std::abs(std::abs(s.dot(es.normalized())) - 1) < 1e-12);
  CHECK(std::abs(std::abs(u.dot(eu.normalized())) - 1) < 1e-12);
  CHECK(std::acos(std::abs(s.dot(u))) > 0.5);
}

TEST_CASE("eigenvalue one gives a center line and a reducible polynomial") {
  const IntegerMatrix center({{1, 0, 0}, {0, 2, 1}, {0, 1, 1}});
  const auto sd = spectral_classify(center);
  CHECK(sd.classification == SpectralClass::partially_hyperbolic_center);
  CHECK_FALSE(sd.irreducible_over_rationals);
  const auto sp = invariant_splitting(sd, center);
  REQUIRE(sp.has(Label::center));
  const Vec c = sp.at(Label::center).basis.col(0);
  CHECK((center.to_real() * c - c).norm() == 0.0);
}
