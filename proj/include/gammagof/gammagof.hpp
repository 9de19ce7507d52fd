#pragma once

#include "gammagof/asymptotics.hpp"
#include "gammagof/bootstrap.hpp"
#include "gammagof/distributions.hpp"
#include "gammagof/errors.hpp"
#include "gammagof/estimators.hpp"
#include "gammagof/gamma_expectations.hpp"
#include "gammagof/parallel.hpp"
#include "gammagof/power_study.hpp"
#include "gammagof/quadrature.hpp"
#include "gammagof/rng.hpp"
#include "gammagof/special_functions.hpp"
#include "gammagof/statistics.hpp"
#include "gammagof/text.hpp"
#include "gammagof/transform.hpp"
