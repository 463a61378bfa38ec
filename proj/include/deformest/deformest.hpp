#pragma once

#include "deformest/contrast.hpp"
#include "deformest/deformations.hpp"
#include "deformest/density.hpp"
#include "deformest/errors.hpp"
#include "deformest/estimator.hpp"
#include "deformest/experiments.hpp"
#include "deformest/io.hpp"
#include "deformest/quadrature.hpp"
#include "deformest/rng.hpp"
#include "deformest/simulation.hpp"
#include "deformest/stats.hpp"
