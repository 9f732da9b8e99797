#pragma once

#include "vne/chebyshev.hpp"
#include "vne/dense.hpp"
#include "vne/entropy.hpp"
#include "vne/error.hpp"
#include "vne/generators.hpp"
#include "vne/hutchinson.hpp"
#include "vne/io.hpp"
#include "vne/parallel.hpp"
#include "vne/power.hpp"
#include "vne/report.hpp"
#include "vne/rng.hpp"
#include "vne/sketch.hpp"
#include "vne/sparse.hpp"
#include "vne/taylor.hpp"
