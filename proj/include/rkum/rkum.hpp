#pragma once

#include "rkum/eigsolver.hpp"
#include "rkum/error.hpp"
#include "rkum/influence.hpp"
#include "rkum/kcca.hpp"
#include "rkum/kernels.hpp"
#include "rkum/kirwls.hpp"
#include "rkum/rng.hpp"
#include "rkum/robust_loss.hpp"
#include "rkum/synthdata.hpp"
