#include <gtest/gtest.h>

#include <random>

#include "fhdet/expr.hpp"
#include "fhdet/symbols.hpp"

using namespace fhdet;

namespace {

SymbolSpec line_spec(std::vector<FHSingularity> s, const std::string& F = "1") {
  SymbolSpec spec;
  spec.geometry = Geometry::line;
  spec.regular = RegularPart::from_expression(F);
  spec.singularities = std::move(s);
  return spec;
}

SymbolSpec circle_spec(std::vector<FHSingularity> s, const std::string& b = "1") {
  SymbolSpec spec;
  spec.geometry = Geometry::circle;
  spec.regular = RegularPart::from_expression(b);
  spec.singularities = std::move(s);
  return spec;
}

bool has_failure(const ValidationReport& r, const std::string& needle) {
  return r.failures().find(needle) != std::string::npos;
}

}  // namespace

TEST(Expression, Arithmetic) {
  EXPECT_NEAR(std::abs(Expression::parse("1 + 2*3 - 4/2")(0.0) - 5.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(Expression::parse("2^3^2")(0.0) - 512.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(Expression::parse("-2^2")(0.0) + 4.0), 0.0, 1e-15);
  cplx z(0.3, -0.7);
  EXPECT_NEAR(std::abs(Expression::parse("exp(1/(xi^2+1))")(z) - std::exp(1.0 / (z * z + 1.0))), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(Expression::parse("exp(0.5*cos(theta))")(std::polar(1.0, 0.4)) - std::exp(0.5 * std::cos(0.4))),
              0.0, 1e-14);
  EXPECT_NEAR(std::abs(Expression::parse("exp(0.25*(z+1/z))")(std::polar(1.0, 0.4)) - std::exp(0.5 * std::cos(0.4))),
              0.0, 1e-14);
}

TEST(Expression, Errors) {
  EXPECT_THROW(Expression::parse("1 +"), ParseError);
  EXPECT_THROW(Expression::parse("foo(2)"), ParseError);
  EXPECT_THROW(Expression::parse("(1"), ParseError);
  EXPECT_THROW(Expression::parse(""), ParseError);
}

TEST(Expression, ComplexLiterals) {
  EXPECT_EQ(parse_complex("0.3-0.1i"), cplx(0.3, -0.1));
  EXPECT_EQ(parse_complex("-1"), cplx(-1.0, 0.0));
  EXPECT_NEAR(std::abs(parse_complex("exp(i*pi/4)") - std::polar(1.0, kPi / 4)), 0.0, 1e-15);
  EXPECT_THROW(parse_complex("xi+1"), ParseError);
}

TEST(Singularity, ExponentAlgebra) {
  auto a = make_singularity(0.0, 0.0, 0.0);
  EXPECT_EQ(a.delta, cplx(0.0));
  EXPECT_EQ(a.gamma_exp, cplx(0.0));
  auto b = make_singularity(0.0, -0.2, 0.2);
  EXPECT_NEAR(std::abs(b.delta - 0.2), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(b.gamma_exp), 0.0, 1e-16);
  auto c = make_singularity(1.0, cplx(0.1, 0.05), cplx(0.3, -0.05));
  EXPECT_NEAR(std::abs(c.delta - cplx(0.1, -0.05)), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(c.gamma_exp - 0.2), 0.0, 1e-16);
}

TEST(Singularity, RoundTripProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int i = 0; i < 500; ++i) {
    cplx g(u(rng), u(rng)), d(u(rng), u(rng));
    auto s = make_singularity_gd(0.0, g, d);
    auto t = make_singularity(0.0, s.nu, s.nubar);
    EXPECT_NEAR(std::abs(t.gamma_exp - g), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(t.delta - d), 0.0, 1e-15);
  }
}

TEST(Validate, ExponentBounds) {
  auto line = validate_symbol(line_spec({make_singularity_gd(0.0, 0.3, 0.0)}));
  EXPECT_FALSE(line.ok);
  EXPECT_TRUE(has_failure(line, "Re(gamma) < 1/4 violated"));
  EXPECT_TRUE(validate_symbol(circle_spec({make_singularity_gd(1.0, 0.3, 0.0)})).ok);
  EXPECT_TRUE(validate_symbol(circle_spec({})).ok);
  EXPECT_FALSE(validate_symbol(circle_spec({make_singularity_gd(1.0, 0.0, 0.6)})).ok);
}

TEST(Validate, Locations) {
  EXPECT_FALSE(validate_symbol(circle_spec({make_singularity_gd(0.9, 0.1, 0.0)})).ok);
  EXPECT_FALSE(validate_symbol(line_spec({make_singularity_gd(cplx(0, 1), 0.1, 0.0)})).ok);
  EXPECT_FALSE(
      validate_symbol(line_spec({make_singularity_gd(0.0, 0.1, 0.0), make_singularity_gd(1e-8, 0.1, 0.0)})).ok);
}

TEST(Validate, RegularPart) {
  EXPECT_TRUE(validate_symbol(line_spec({}, "exp(1/(xi^2+1))")).ok);
  // vanishes at xi = 0
  EXPECT_FALSE(validate_symbol(line_spec({}, "xi^2/(xi^2+1)")).ok);
  // does not tend to 1
  EXPECT_FALSE(validate_symbol(line_spec({}, "2")).ok);
  EXPECT_TRUE(validate_symbol(circle_spec({}, "exp(0.5*cos(theta))")).ok);
  auto w = validate_symbol(circle_spec({}, "z"));
  EXPECT_FALSE(w.ok);
  EXPECT_TRUE(has_failure(w, "winding"));
}

TEST(Winding, Examples) {
  EXPECT_EQ(winding_number(RegularPart::one()), 0);
  EXPECT_EQ(winding_number(RegularPart::from_expression("z")), 1);
  EXPECT_EQ(winding_number(RegularPart::from_expression("1/z^3")), -3);
  EXPECT_EQ(winding_number(RegularPart::from_expression("exp(0.5*cos(theta))")), 0);
  EXPECT_EQ(winding_number(RegularPart::from_expression("(z-0.5)^2*(1-0.3/z)")), 2);
}

TEST(LineSymbol, Trivial) {
  auto s = line_spec({});
  for (double x : {-3.0, 0.0, 0.1, 7.0}) EXPECT_EQ(eval_line_symbol(s, x), cplx(1.0));
}

TEST(LineSymbol, JumpLimits) {
  // gamma = 0: sigma -> exp(-i pi delta sgn xi) with the principal branches
  auto s = line_spec({make_singularity_gd(0.0, 0.0, 0.2)});
  cplx right = eval_line_symbol(s, 1e-8), left = eval_line_symbol(s, -1e-8);
  EXPECT_NEAR(std::abs(right - std::exp(-kI * kPi * 0.2)), 0.0, 1e-7);
  EXPECT_NEAR(std::abs(left - std::exp(kI * kPi * 0.2)), 0.0, 1e-7);
  EXPECT_NEAR(std::abs(eval_line_symbol(s, 0.0, Side::above) - std::exp(-kI * kPi * 0.2)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(eval_line_symbol(s, 0.0, Side::below) - std::exp(kI * kPi * 0.2)), 0.0, 1e-15);
  EXPECT_THROW(eval_line_symbol(s, 0.0), SingularPointError);
  auto g = line_spec({make_singularity_gd(0.0, 0.1, 0.0)});
  EXPECT_THROW(eval_line_symbol(g, 0.0, Side::above), SingularPointError);
}

TEST(LineSymbol, DecaysLikeOneOverXi) {
  auto s = line_spec({make_singularity_gd(0.0, 0.0, 0.2)});
  // sigma - 1 = -2 i delta / xi + O(1/xi^2) for gamma = 0
  for (double x : {1e2, 1e3, 1e4}) {
    cplx r = (eval_line_symbol(s, x) - 1.0) * x;
    EXPECT_NEAR(std::abs(r - cplx(0, -0.4)), 0.0, 2.0 / x);
  }
}

TEST(LineSymbol, LocalBehaviourProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<FHSingularity> s{make_singularity_gd(-1.0, cplx(u(rng), u(rng)), cplx(u(rng), u(rng))),
                                 make_singularity_gd(0.7, cplx(u(rng), u(rng)), cplx(u(rng), u(rng)))};
    auto spec = line_spec(s, "exp(1/(xi^2+4))");
    for (std::size_t k = 0; k < 2; ++k) {
      for (double sg : {1.0, -1.0}) {
        double d = sg * 1e-7;
        double xi = s[k].location.real() + d;
        cplx rest = spec.regular(xi) * line_fh_factor(s[1 - k].nu, s[1 - k].nubar, xi - s[1 - k].location.real());
        cplx v = std::exp(2.0 * s[k].gamma_exp * std::log(std::abs(d)) + kI * kPi * s[k].delta * sg) *
                 eval_line_symbol(spec, xi) / rest;
        // the correction is O(|d|)
        EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-5);
      }
    }
  }
}

TEST(LineSymbol, LogIsContinuousBranch) {
  auto spec = line_spec({make_singularity_gd(0.0, 0.1, 0.3), make_singularity_gd(0.5, -0.1, -0.4)},
                        "exp(1/(xi^2+1))");
  for (double x : {-5.0, -0.3, 0.2, 0.8, 30.0})
    EXPECT_NEAR(std::abs(std::exp(log_line_symbol(spec, x)) - eval_line_symbol(spec, x)), 0.0, 1e-13);
  EXPECT_LT(std::abs(log_line_symbol(spec, 1e6)), 1e-5);
}

TEST(CircleSymbol, Trivial) {
  auto s = circle_spec({});
  for (double t : {0.0, 1.0, 3.0}) EXPECT_EQ(eval_circle_symbol(s, t), cplx(1.0));
}

TEST(CircleSymbol, MatchesJumpModulusForm) {
  // sigma = e^{i delta (theta - pi sgn theta)} / (2 - 2 cos theta)^gamma for a = 1
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.3, 0.3), th(-3.1, 3.1);
  for (int trial = 0; trial < 200; ++trial) {
    cplx g(u(rng), u(rng)), d(u(rng), u(rng));
    double t = th(rng);
    if (std::abs(t) < 1e-3) continue;
    auto s = circle_spec({make_singularity_gd(1.0, g, d)});
    double sg = t > 0 ? 1.0 : -1.0;
    cplx expect = std::exp(kI * d * (t - kPi * sg) - g * std::log(2.0 - 2.0 * std::cos(t)));
    EXPECT_NEAR(std::abs(eval_circle_symbol(s, t) / expect - 1.0), 0.0, 1e-12);
  }
}

TEST(CircleSymbol, JumpAndModulusLimits) {
  auto s = circle_spec({make_singularity_gd(1.0, 0.0, 0.2)});
  cplx ratio = eval_circle_symbol(s, 0.01) / eval_circle_symbol(s, -0.01);
  EXPECT_NEAR(std::abs(ratio), 1.0, 1e-12);
  // phase jump 2 pi delta minus the smooth part 2 delta * 0.01
  EXPECT_NEAR(std::arg(ratio), -2.0 * kPi * 0.2 + 2 * 0.2 * 0.01, 1e-12);
  auto g = circle_spec({make_singularity_gd(1.0, 0.1, 0.0)});
  for (double t : {1e-2, 1e-4, 1e-6})
    EXPECT_NEAR(std::abs(eval_circle_symbol(g, t)) * std::pow(4.0 * std::sin(0.5 * t) * std::sin(0.5 * t), 0.1), 1.0, 1e-12);
  EXPECT_THROW(eval_circle_symbol(g, 0.0), SingularPointError);
}

TEST(CircleSymbol, PeriodicProperty) {
  auto s = circle_spec({make_singularity_gd(std::polar(1.0, 1.0), cplx(0.2, 0.1), cplx(-0.3, 0.05)),
                        make_singularity_gd(std::polar(1.0, -2.0), -0.1, 0.25)},
                       "exp(0.3*cos(theta)+0.1*sin(2*theta))");
  for (int j = 0; j < 64; ++j) {
    double t = -3.0 + 0.09 * j;
    cplx a = eval_circle_symbol(s, t), b = eval_circle_symbol(s, t + kTwoPi);
    EXPECT_NEAR(std::abs(a - b), 0.0, 1e-12 * std::abs(a));
  }
}
