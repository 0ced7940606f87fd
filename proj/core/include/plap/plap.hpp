#pragma once

#include "plap/bounds.hpp"
#include "plap/geometry.hpp"
#include "plap/gmm.hpp"
#include "plap/memorization.hpp"
#include "plap/plaplace.hpp"
#include "plap/rng.hpp"
#include "plap/score_field.hpp"
#include "plap/score_model.hpp"
#include "plap/types.hpp"
