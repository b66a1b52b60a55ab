// Truncated Hilbert space of one transmon qutrit and two resonator modes,
// plus the dense operator algebra used by every other module.
//
// Basis ordering is fixed: slot order (qutrit, res_a, res_b), row-major index
//   q * dim_a * dim_b + n_a * dim_b + n_b
// so dumps from different tools can be compared entry by entry.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace noon {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr cplx I{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct dimension_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct transition_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct space_mismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class Level : int { g = 0, e = 1, f = 2 };
enum class Slot { qutrit, res_a, res_b };

inline char level_name(Level l) {
  constexpr std::array<char, 3> names{'g', 'e', 'f'};
  return names[static_cast<std::size_t>(l)];
}

struct BasisIndex {
  Level q;
  int n_a;
  int n_b;
  bool operator==(const BasisIndex&) const = default;
};

class HilbertSpace {
 public:
  static constexpr int qutrit_dim = 3;

  HilbertSpace(int dim_a, int dim_b) : dim_a_(dim_a), dim_b_(dim_b) {
    if (dim_a < 2 || dim_b < 2)
      throw dimension_error("resonator dimension must be >= 2 (got " + std::to_string(dim_a) +
                            ", " + std::to_string(dim_b) + ")");
  }

  int dim_a() const { return dim_a_; }
  int dim_b() const { return dim_b_; }
  int total_dim() const { return qutrit_dim * dim_a_ * dim_b_; }

  int slot_dim(Slot s) const {
    switch (s) {
      case Slot::qutrit: return qutrit_dim;
      case Slot::res_a: return dim_a_;
      case Slot::res_b: return dim_b_;
    }
    return 0;
  }

  int flatten(Level q, int n_a, int n_b) const {
    if (n_a < 0 || n_a >= dim_a_ || n_b < 0 || n_b >= dim_b_)
      throw dimension_error("Fock index out of range");
    return static_cast<int>(q) * dim_a_ * dim_b_ + n_a * dim_b_ + n_b;
  }
  int flatten(BasisIndex b) const { return flatten(b.q, b.n_a, b.n_b); }

  BasisIndex unflatten(int index) const {
    if (index < 0 || index >= total_dim()) throw dimension_error("basis index out of range");
    const int per_q = dim_a_ * dim_b_;
    return {static_cast<Level>(index / per_q), (index % per_q) / dim_b_, index % dim_b_};
  }

  std::string label(int index) const {
    const auto b = unflatten(index);
    return std::string("|") + level_name(b.q) + "," + std::to_string(b.n_a) + "," +
           std::to_string(b.n_b) + ">";
  }

  bool operator==(const HilbertSpace&) const = default;

 private:
  int dim_a_;
  int dim_b_;
};

inline void require_same(const HilbertSpace& x, const HilbertSpace& y, const char* what) {
  if (!(x == y)) throw space_mismatch(std::string(what) + ": Hilbert spaces differ");
}

/// Matrix on the full tripartite space. Entries are angular frequencies
/// (rad/s, hbar = 1) when the operator is used as a Hamiltonian term.
struct Operator {
  HilbertSpace space;
  Matrix m;

  Operator(HilbertSpace s, Matrix entries) : space(s), m(std::move(entries)) {
    if (m.rows() != space.total_dim() || m.cols() != space.total_dim())
      throw dimension_error("operator shape does not match Hilbert space");
  }
  static Operator zero(HilbertSpace s) {
    return {s, Matrix::Zero(s.total_dim(), s.total_dim())};
  }
  static Operator identity(HilbertSpace s) {
    return {s, Matrix::Identity(s.total_dim(), s.total_dim())};
  }

  Operator adjoint() const { return {space, m.adjoint()}; }

  Operator& operator+=(const Operator& o) {
    require_same(space, o.space, "operator +");
    m += o.m;
    return *this;
  }
  friend Operator operator+(Operator x, const Operator& y) { return x += y; }
  friend Operator operator-(Operator x, const Operator& y) {
    require_same(x.space, y.space, "operator -");
    x.m -= y.m;
    return x;
  }
  friend Operator operator*(const Operator& x, const Operator& y) {
    require_same(x.space, y.space, "operator *");
    return {x.space, x.m * y.m};
  }
  friend Operator operator*(cplx c, Operator x) {
    x.m *= c;
    return x;
  }
  friend Operator operator*(double c, Operator x) {
    x.m *= c;
    return x;
  }
};

struct Ket {
  HilbertSpace space;
  Vector amplitudes;

  Ket(HilbertSpace s, Vector v) : space(s), amplitudes(std::move(v)) {
    if (amplitudes.size() != space.total_dim())
      throw dimension_error("ket length does not match Hilbert space");
  }
  static Ket basis(HilbertSpace s, Level q, int n_a, int n_b) {
    Vector v = Vector::Zero(s.total_dim());
    v(s.flatten(q, n_a, n_b)) = 1.0;
    return {s, std::move(v)};
  }
  double norm() const { return amplitudes.norm(); }
};

struct DensityMatrix {
  HilbertSpace space;
  Matrix m;

  DensityMatrix(HilbertSpace s, Matrix entries) : space(s), m(std::move(entries)) {
    if (m.rows() != space.total_dim() || m.cols() != space.total_dim())
      throw dimension_error("density matrix shape does not match Hilbert space");
  }
  static DensityMatrix pure(const Ket& psi) {
    return {psi.space, psi.amplitudes * psi.amplitudes.adjoint()};
  }

  double trace_real() const { return m.trace().real(); }
  double hermiticity_error() const { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }
  double min_eigenvalue() const {
    const Matrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
};

// ---- single-mode factors -------------------------------------------------

/// Bosonic lowering operator truncated to `dim` Fock levels.
inline Matrix annihilation(int dim) {
  if (dim < 2) throw dimension_error("annihilation: dim must be >= 2");
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline Matrix creation(int dim) {
  if (dim < 2) throw dimension_error("creation: dim must be >= 2");
  Matrix ad = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) ad(n, n - 1) = std::sqrt(static_cast<double>(n));
  return ad;
}

/// |lower><upper| on the qutrit; its adjoint is the raising operator.
inline Matrix qutrit_transition(Level lower, Level upper) {
  if (static_cast<int>(lower) >= static_cast<int>(upper))
    throw transition_error(std::string("qutrit_transition: need lower < upper, got ") +
                           level_name(lower) + "," + level_name(upper));
  Matrix s = Matrix::Zero(3, 3);
  s(static_cast<int>(lower), static_cast<int>(upper)) = 1.0;
  return s;
}

/// |bra><ket| on the qutrit with no ordering requirement.
inline Matrix qutrit_outer(Level row, Level col) {
  Matrix s = Matrix::Zero(3, 3);
  s(static_cast<int>(row), static_cast<int>(col)) = 1.0;
  return s;
}

inline Matrix qutrit_projector(Level l) { return qutrit_outer(l, l); }

// ---- tensor structure ----------------------------------------------------

inline Matrix kron(const Matrix& x, const Matrix& y) {
  Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

/// Lift a single-slot factor to the full space: identity on the other slots.
inline Operator embed(const Matrix& factor, Slot slot, HilbertSpace space) {
  const int d = space.slot_dim(slot);
  if (factor.rows() != d || factor.cols() != d)
    throw dimension_error("embed: factor is " + std::to_string(factor.rows()) + "x" +
                          std::to_string(factor.cols()) + ", slot needs " + std::to_string(d));
  const Matrix iq = Matrix::Identity(3, 3);
  const Matrix ia = Matrix::Identity(space.dim_a(), space.dim_a());
  const Matrix ib = Matrix::Identity(space.dim_b(), space.dim_b());
  switch (slot) {
    case Slot::qutrit: return {space, kron(kron(factor, ia), ib)};
    case Slot::res_a: return {space, kron(kron(iq, factor), ib)};
    case Slot::res_b: return {space, kron(kron(iq, ia), factor)};
  }
  throw dimension_error("embed: bad slot");
}

/// Shorthand for the operators that appear in the Hamiltonians.
struct Ops {
  HilbertSpace space;
  Operator a, b;            // lowering operators of the two resonators
  Operator s_eg, s_fe;      // |g><e|, |e><f|
  Operator p_e, p_f;        // |e><e|, |f><f|

  explicit Ops(HilbertSpace s)
      : space(s),
        a(embed(annihilation(s.dim_a()), Slot::res_a, s)),
        b(embed(annihilation(s.dim_b()), Slot::res_b, s)),
        s_eg(embed(qutrit_transition(Level::g, Level::e), Slot::qutrit, s)),
        s_fe(embed(qutrit_transition(Level::e, Level::f), Slot::qutrit, s)),
        p_e(embed(qutrit_projector(Level::e), Slot::qutrit, s)),
        p_f(embed(qutrit_projector(Level::f), Slot::qutrit, s)) {}
};

inline cplx expectation(const Operator& op, const DensityMatrix& rho) {
  require_same(op.space, rho.space, "expectation");
  // tr(A rho) without forming the product
  return (op.m.transpose().cwiseProduct(rho.m)).sum();
}

inline cplx inner(const Ket& x, const Ket& y) {
  require_same(x.space, y.space, "inner");
  return x.amplitudes.dot(y.amplitudes);
}

/// Population of the highest Fock level kept for the given resonator.
inline double top_level_population(const DensityMatrix& rho, Slot slot) {
  const auto& s = rho.space;
  const int top = s.slot_dim(slot) - 1;
  double p = 0.0;
  for (int i = 0; i < s.total_dim(); ++i) {
    const auto b = s.unflatten(i);
    const int n = slot == Slot::res_a ? b.n_a : b.n_b;
    if (n == top) p += rho.m(i, i).real();
  }
  return p;
}

}  // namespace noon
