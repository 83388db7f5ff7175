#pragma once

#include "hpbem/contact.hpp"

namespace hpbem {

/// Mixed boundary value problem with a linear Tresca friction threshold on the
/// unit square: contact at the bottom, Dirichlet patch on the top right,
/// tractions on the left edge and the top left.
ProblemSpec tresca_square_spec();

/// Pure Neumann problem with Coulomb friction on the unit square: contact at
/// the bottom, squeezing side loads and a downward top load, zero gap.
ProblemSpec coulomb_square_spec();

/// Scale all Neumann data of a spec by a factor (used by the solver oracle tests).
ProblemSpec scale_traction(const ProblemSpec& spec, double factor);

} // namespace hpbem
