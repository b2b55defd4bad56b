#pragma once

#include "relaxir/errors.hpp"
#include "relaxir/experiment.hpp"
#include "relaxir/generators.hpp"
#include "relaxir/linalg.hpp"
#include "relaxir/matrix_io.hpp"
#include "relaxir/metrics.hpp"
#include "relaxir/refine.hpp"
#include "relaxir/solvers.hpp"
#include "relaxir/text.hpp"
#include "relaxir/theory.hpp"
