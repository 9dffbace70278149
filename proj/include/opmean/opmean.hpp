#pragma once

#include "opmean/barycenter.hpp"
#include "opmean/divergence.hpp"
#include "opmean/errors.hpp"
#include "opmean/geodesics.hpp"
#include "opmean/matcore.hpp"
#include "opmean/means.hpp"
#include "opmean/random.hpp"
