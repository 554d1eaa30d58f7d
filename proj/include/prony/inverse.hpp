#ifndef PRONY_INVERSE_HPP
#define PRONY_INVERSE_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include "prony/signal.hpp"

namespace prony {

struct InversionConfig {
  /// A root is accepted as real when |Im z| <= real_root_imag_tol * max(1, |Re z|).
  double real_root_imag_tol = 1e-8;
  /// Minimum gap between recovered nodes.
  double collision_tol = 1e-12;
  /// Newton iterations polishing each root against the Prony polynomial.
  int refine_steps = 2;
  /// Reciprocal-condition threshold below which the Hankel system is singular.
  double hankel_rcond_tol = 1e-14;

  void validate() const;
};

enum class InversionErrorKind { SingularHankel, ComplexRoots, NodeCollision, AmplitudeSolveFailed };

const char* to_string(InversionErrorKind kind);

struct InversionError {
  InversionErrorKind kind;
  std::string detail;
};

/// Value-or-error return for operations that invert the Prony mapping.
template <class T>
class Result {
 public:
  Result(T value) : state_(std::move(value)) {}
  Result(InversionError error) : state_(std::move(error)) {}

  bool ok() const { return std::holds_alternative<T>(state_); }
  explicit operator bool() const { return ok(); }

  const T& value() const {
    if (!ok()) throw std::runtime_error(std::string("inversion failed: ") + error().detail);
    return std::get<T>(state_);
  }
  const T& operator*() const { return value(); }
  const T* operator->() const { return &value(); }

  const InversionError& error() const { return std::get<InversionError>(state_); }

 private:
  std::variant<T, InversionError> state_;
};

/// Classical Prony inversion of 2d moments: Hankel solve for the Prony
/// polynomial, companion-matrix roots with Newton polish, then a Vandermonde
/// solve for the amplitudes.
Result<Signal> solve_prony(const MomentVector& mu, std::size_t d, const InversionConfig& cfg = {});

/// max_k |m_k(F) - mu_k| over the length of mu.
double moment_residual(const MomentVector& mu, const Signal& signal);

}  // namespace prony

#endif  // PRONY_INVERSE_HPP
