#pragma once

#include "rateloss/bounds.hpp"
#include "rateloss/cv.hpp"
#include "rateloss/decoy.hpp"
#include "rateloss/entropy.hpp"
#include "rateloss/gaussian.hpp"
#include "rateloss/optimize.hpp"
#include "rateloss/sweep.hpp"
#include "rateloss/version.hpp"
