#pragma once

#include "ballsaddle/best_approx.hpp"
#include "ballsaddle/catalog.hpp"
#include "ballsaddle/constants.hpp"
#include "ballsaddle/errors.hpp"
#include "ballsaddle/hilbert.hpp"
#include "ballsaddle/oracle.hpp"
#include "ballsaddle/parallel.hpp"
#include "ballsaddle/saddle.hpp"
#include "ballsaddle/sampling.hpp"
#include "ballsaddle/vi.hpp"
