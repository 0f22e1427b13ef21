#pragma once

#include "phdyn/common.hpp"
#include "phdyn/linear_models.hpp"

#include <memory>
#include <optional>
#include <string>

namespace phdyn::maps {

enum class DomainKind { torus, region };

// Torus maps use the unit cube as fundamental domain; region maps declare a box
// and send everything that leaves it to an exterior sink.
struct Domain {
  DomainKind kind = DomainKind::torus;
  Vec lower;
  Vec upper;
  bool contains(const Vec& x) const;  // half-open [lower, upper)
};

struct Evaluation {
  Vec image;
  Mat jacobian;
};

class Map {
 public:
  virtual ~Map() = default;
  virtual std::string kind() const = 0;

  int dim() const { return d_; }
  const Domain& domain() const { return domain_; }
  bool is_torus() const { return domain_.kind == DomainKind::torus; }

  // nullopt marks escape from a region map.  Non-finite input throws.
  std::optional<Vec> apply(const Vec& x) const;
  std::optional<Evaluation> evaluate(const Vec& x) const;

  double lipschitz_hint() const { return lipschitz_; }
  bool lipschitz_is_heuristic() const { return heuristic_; }
  // Entrywise bounds |∂f_i/∂x_j| ≤ L_ij.  Default: the isotropic hint everywhere.
  virtual Mat axis_lipschitz() const;
  // Whether some point of the half-open box [lo, hi) may leave the region in
  // one step.  Torus maps never escape.
  virtual bool box_may_escape(const Vec& lo, const Vec& hi) const;

 protected:
  Map(int d, Domain dom) : d_(d), domain_(std::move(dom)) {}
  virtual std::optional<Vec> apply_impl(const Vec& x) const = 0;
  virtual std::optional<Evaluation> evaluate_impl(const Vec& x) const = 0;

  int d_;
  Domain domain_;
  double lipschitz_ = 1.0;
  bool heuristic_ = false;
};

using MapPtr = std::shared_ptr<const Map>;

// F(x) = A·x + φ(x) on covering space with φ ℤᵈ-periodic.
class TorusLiftMap : public Map {
 public:
  const linear::IntegerMatrix& linear_part() const { return lin_; }
  const Mat& linear_real() const { return A_; }
  Vec displacement(const Vec& x) const { return phi(x); }
  Mat displacement_jacobian(const Vec& x) const { return dphi(x); }
  double c0_bound() const { return c0_; }
  // Lift inverse.  The default solves A·x + φ(x) = y by Newton.
  virtual Vec inverse(const Vec& y) const;
  Vec lift(const Vec& x) const { return A_ * x + phi(x); }

 protected:
  explicit TorusLiftMap(linear::IntegerMatrix A);
  virtual Vec phi(const Vec& x) const = 0;
  virtual Mat dphi(const Vec& x) const = 0;
  std::optional<Vec> apply_impl(const Vec& x) const override { return lift(x); }
  std::optional<Evaluation> evaluate_impl(const Vec& x) const override;

  linear::IntegerMatrix lin_;
  Mat A_;
  Mat Ainv_;
  double c0_ = 0.0;
};

using TorusMapPtr = std::shared_ptr<const TorusLiftMap>;

class LinearMap : public TorusLiftMap {
 public:
  explicit LinearMap(linear::IntegerMatrix A);
  std::string kind() const override { return "linear"; }
  Vec inverse(const Vec& y) const override { return Ainv_ * y; }

 protected:
  Vec phi(const Vec& x) const override { return Vec::Zero(x.size()); }
  Mat dphi(const Vec& x) const override { return Mat::Zero(x.size(), x.size()); }
};

// x ↦ x + c on Tᵈ.
class TranslationMap : public TorusLiftMap {
 public:
  explicit TranslationMap(Vec shift);
  std::string kind() const override { return "translation"; }
  Vec inverse(const Vec& y) const override { return y - shift_; }
  const Vec& shift() const { return shift_; }

 protected:
  Vec phi(const Vec&) const override { return shift_; }
  Mat dphi(const Vec& x) const override { return Mat::Zero(x.size(), x.size()); }

 private:
  Vec shift_;
};

// Coordinatewise circle maps x_i ↦ x_i + c_i + a_i·sin(2π k_i x_i).  Small test
// family: gradient-like circles, attracting circles, products of such.
class CircleProductMap : public TorusLiftMap {
 public:
  struct Factor {
    double shift = 0.0;
    double amplitude = 0.0;
    int frequency = 1;
  };
  explicit CircleProductMap(std::vector<Factor> factors);
  std::string kind() const override { return "circle_product"; }
  const std::vector<Factor>& factors() const { return factors_; }

 protected:
  Vec phi(const Vec& x) const override;
  Mat dphi(const Vec& x) const override;

 private:
  std::vector<Factor> factors_;
};

// Torus distance between two points of covering space.
double torus_distance(const Vec& a, const Vec& b);
// Reduce into [0,1)ᵈ.
Vec reduce_mod1(const Vec& x);

}  // namespace phdyn::maps
