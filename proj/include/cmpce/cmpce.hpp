#pragma once

#include "cmpce/conformal.hpp"
#include "cmpce/density.hpp"
#include "cmpce/errors.hpp"
#include "cmpce/io.hpp"
#include "cmpce/models.hpp"
#include "cmpce/orthopoly.hpp"
#include "cmpce/pce.hpp"
#include "cmpce/quadrature.hpp"
#include "cmpce/stats.hpp"
