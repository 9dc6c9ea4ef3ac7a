#pragma once

// Plausibility-contour inference for censored time-to-event data:
// parametric survival families, censored-data likelihoods, role-reversed
// Kaplan-Meier estimation of the censoring law, and Monte Carlo calibration
// of the relative likelihood into valid plausibility regions.

#include "survplaus/common.hpp"
#include "survplaus/csv.hpp"
#include "survplaus/data.hpp"
#include "survplaus/grid.hpp"
#include "survplaus/math.hpp"
#include "survplaus/mle.hpp"
#include "survplaus/model.hpp"
#include "survplaus/nelder_mead.hpp"
#include "survplaus/plausibility.hpp"
#include "survplaus/random.hpp"
#include "survplaus/serialize.hpp"
#include "survplaus/simulation.hpp"
#include "survplaus/step_distribution.hpp"
