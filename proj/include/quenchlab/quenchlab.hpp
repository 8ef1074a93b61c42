#pragma once

#include "corpus.hpp"
#include "disorder.hpp"
#include "disordered.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "inequality_lab.hpp"
#include "io.hpp"
#include "lattice.hpp"
#include "limit_study.hpp"
#include "parallel.hpp"
#include "quenched.hpp"
#include "rng.hpp"
#include "suite.hpp"
