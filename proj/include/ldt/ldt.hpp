#pragma once

#include "affine_form.hpp"
#include "bench.hpp"
#include "commands.hpp"
#include "instance.hpp"
#include "lp.hpp"
#include "oracle.hpp"
#include "pointloc.hpp"
#include "prism.hpp"
#include "rational.hpp"
#include "rng.hpp"
#include "sign.hpp"
#include "solver.hpp"
#include "transform.hpp"
