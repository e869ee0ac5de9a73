#pragma once

#include "errors.hpp"
#include "format.hpp"
#include "smatrix_io.hpp"
#include "polynomial.hpp"
#include "pade.hpp"
#include "quadrature.hpp"
#include "amplitudes.hpp"
#include "resonance.hpp"
#include "trajectories.hpp"
#include "synth.hpp"
#include "config.hpp"
#include "pipeline.hpp"
