#ifndef OSCILLAB_HPP
#define OSCILLAB_HPP

#include "oscillab/rational.hpp"
#include "oscillab/polynomial.hpp"
#include "oscillab/newton_polytope.hpp"
#include "oscillab/nondegeneracy.hpp"
#include "oscillab/rlct.hpp"
#include "oscillab/cutoff.hpp"
#include "oscillab/quadrature.hpp"
#include "oscillab/oscillatory.hpp"
#include "oscillab/asymptotic_fit.hpp"
#include "oscillab/json_io.hpp"
#include "oscillab/experiments.hpp"

#endif // OSCILLAB_HPP
