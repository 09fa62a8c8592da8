#pragma once

#include "eprsim/hilbert.hpp"

namespace eprsim::linalg {

// exp(G) for anti-Hermitian G (G^dagger = -G), via the eigendecomposition of
// the Hermitian matrix iG. The result is unitary to rounding.
CMatrix expm_antihermitian(const CMatrix& generator);

// General real matrix exponential (Pade scaling and squaring).
RMatrix expm(const RMatrix& a);

}  // namespace eprsim::linalg
