#pragma once

#include "rrnum/errors.hpp"
#include "rrnum/error_model.hpp"
#include "rrnum/utility.hpp"
#include "rrnum/network.hpp"
#include "rrnum/lemmas.hpp"
#include "rrnum/scalar_solve.hpp"
#include "rrnum/local_solvers.hpp"
#include "rrnum/validation.hpp"
#include "rrnum/schedule.hpp"
#include "rrnum/result.hpp"
#include "rrnum/repair.hpp"
#include "rrnum/dual_loop.hpp"
#include "rrnum/integrated.hpp"
#include "rrnum/differentiated.hpp"
#include "rrnum/barrier.hpp"
#include "rrnum/oracle.hpp"
#include "rrnum/random_instance.hpp"
#include "rrnum/config.hpp"
#include "rrnum/harness.hpp"
