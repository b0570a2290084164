#pragma once

// Tight lower bounds for the squared Hellinger distance between probability
// laws with prescribed means and variances, the two-point pair attaining
// them, closed forms for Gaussian and shifted-exponential laws, and the
// numerical verification machinery (feasible-pair sampling, constrained
// minimization, discretization, equal-means vanishing sequences).
//
// All types are immutable after construction and all operations are pure
// functions, so everything here can be shared across threads freely.

#include "hbound/bounds.hpp"
#include "hbound/closed_forms.hpp"
#include "hbound/discrete_pair.hpp"
#include "hbound/errors.hpp"
#include "hbound/moment_spec.hpp"
#include "hbound/verify.hpp"
