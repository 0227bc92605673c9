#ifndef HYBRIDSQ_HYBRIDSQ_HPP
#define HYBRIDSQ_HYBRIDSQ_HPP

#include "hybridsq/errors.hpp"
#include "hybridsq/operators.hpp"
#include "hybridsq/model.hpp"
#include "hybridsq/analytic.hpp"
#include "hybridsq/dynamics.hpp"
#include "hybridsq/spectrum.hpp"
#include "hybridsq/config.hpp"
#include "hybridsq/runner.hpp"

#endif  // HYBRIDSQ_HYBRIDSQ_HPP
