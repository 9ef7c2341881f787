#pragma once

// Umbrella header for the whole library.

#include "oqs/bosonic.hpp"
#include "oqs/coherence.hpp"
#include "oqs/csv.hpp"
#include "oqs/divisibility.hpp"
#include "oqs/dynamics.hpp"
#include "oqs/errors.hpp"
#include "oqs/linalg.hpp"
#include "oqs/models.hpp"
#include "oqs/projection.hpp"
#include "oqs/runner.hpp"
#include "oqs/scenario.hpp"
#include "oqs/zassenhaus.hpp"
