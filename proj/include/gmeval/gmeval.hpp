#pragma once

#include "gmeval/divergence.hpp"
#include "gmeval/errors.hpp"
#include "gmeval/extrapolation.hpp"
#include "gmeval/feature_store.hpp"
#include "gmeval/gaussian.hpp"
#include "gmeval/inception_score.hpp"
#include "gmeval/kernel.hpp"
#include "gmeval/report.hpp"
#include "gmeval/rng.hpp"
#include "gmeval/stat_tests.hpp"
#include "gmeval/testbed.hpp"
