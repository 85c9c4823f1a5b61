#pragma once

// Quadratic stochastic operators of Volterra class ell on the simplex.

#include "ellvolterra/errors.hpp"
#include "ellvolterra/simplex.hpp"
#include "ellvolterra/cubic_matrix.hpp"
#include "ellvolterra/core.hpp"
#include "ellvolterra/classify.hpp"
#include "ellvolterra/extremals.hpp"
#include "ellvolterra/dynamics.hpp"
#include "ellvolterra/families.hpp"
