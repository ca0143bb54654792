#pragma once

#include "shiftsparse/error.hpp"
#include "shiftsparse/eval.hpp"
#include "shiftsparse/gradcheck.hpp"
#include "shiftsparse/model.hpp"
#include "shiftsparse/solver.hpp"
#include "shiftsparse/sparsity.hpp"
#include "shiftsparse/spectral.hpp"
