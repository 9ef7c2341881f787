#pragma once

// Zassenhaus product-of-exponentials expansion of e^{X+Y}.

#include "oqs/errors.hpp"
#include "oqs/linalg.hpp"
#include "oqs/models.hpp"

#include <string>

namespace oqs {

/// Which fourth-order coefficient to use in the fourth factor.
///  printed:  c4 = c3 + 3[[[X,Y],Y],Y] + [[[X,Y],X],Y] + [[X,Y],[X,Y]]
///  standard: c4 = [[[X,Y],X],X] + 3[[[X,Y],X],Y] + 3[[[X,Y],Y],Y]
/// Both enter as e^{-c4/4!}.
enum class C4Variant { printed, standard };

inline const char *to_string(C4Variant v) {
  return v == C4Variant::printed ? "printed" : "standard";
}

struct ZassenhausTerms {
  ComplexMatrix x;
  ComplexMatrix y;
  ComplexMatrix c2;
  ComplexMatrix c3;
  ComplexMatrix c4;          ///< printed form
  ComplexMatrix c4_standard; ///< textbook form, for comparison
  int order = 4;             ///< number of correction factors available beyond e^X e^Y
};

inline ZassenhausTerms zassenhaus_terms(const ComplexMatrix &x, const ComplexMatrix &y) {
  require_same_square(x, y, "zassenhaus_terms");
  ZassenhausTerms t;
  t.x = x;
  t.y = y;
  t.c2 = commutator(x, y);
  const ComplexMatrix c2y = commutator(t.c2, y);
  const ComplexMatrix c2x = commutator(t.c2, x);
  t.c3 = 2.0 * c2y + c2x;
  t.c4 = t.c3 + 3.0 * commutator(c2y, y) + commutator(c2x, y) + commutator(t.c2, t.c2);
  t.c4_standard = commutator(c2x, x) + 3.0 * commutator(c2x, y) + 3.0 * commutator(c2y, y);
  return t;
}

/// X = -i dt (H_S + H_E) lifted, Y = -i dt H_SE.
inline ZassenhausTerms zassenhaus_terms(const HamiltonianTriple &model, double dt) {
  return zassenhaus_terms(-kI * dt * model.free_part(), -kI * dt * model.coupling());
}

/// Product of the first `order` factors:
/// order 1: e^X e^Y; 2: ... e^{-c2/2}; 3: ... e^{-c3/6}; 4: ... e^{-c4/24}.
inline ComplexMatrix zassenhaus_product(const ZassenhausTerms &terms, int order,
                                        C4Variant variant = C4Variant::printed) {
  if (order < 1 || order > 4)
    throw ParameterError("zassenhaus_product: order must be in 1..4, got " + std::to_string(order));
  ComplexMatrix product = expm(terms.x) * expm(terms.y);
  if (order >= 2)
    product *= expm(-terms.c2 / 2.0);
  if (order >= 3)
    product *= expm(-terms.c3 / 6.0);
  if (order >= 4)
    product *= expm(-(variant == C4Variant::printed ? terms.c4 : terms.c4_standard) / 24.0);
  return product;
}

inline ComplexMatrix zassenhaus_product(const ComplexMatrix &x, const ComplexMatrix &y, int order,
                                        C4Variant variant = C4Variant::printed) {
  return zassenhaus_product(zassenhaus_terms(x, y), order, variant);
}

/// ||e^{X+Y} - product||_F.
inline double zassenhaus_error(const ZassenhausTerms &terms, int order,
                               C4Variant variant = C4Variant::printed) {
  return (expm(terms.x + terms.y) - zassenhaus_product(terms, order, variant)).norm();
}

/// error(order, dt) / error(order, dt/2) for the model's X, Y. Returns the
/// empirical power of two: about 2^(order+1) when the factors are correct.
inline double zassenhaus_halving_ratio(const HamiltonianTriple &model, double dt, int order,
                                       C4Variant variant = C4Variant::printed) {
  if (!(dt > 0.0))
    throw ParameterError("zassenhaus_halving_ratio: dt must be positive");
  return zassenhaus_error(zassenhaus_terms(model, dt), order, variant) /
         zassenhaus_error(zassenhaus_terms(model, dt / 2.0), order, variant);
}

} // namespace oqs
