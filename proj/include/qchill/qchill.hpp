// qchill.hpp - umbrella header

#pragma once

#include "qchill/core.hpp"
#include "qchill/models.hpp"
#include "qchill/lindblad.hpp"
#include "qchill/thermo.hpp"
#include "qchill/stages.hpp"
#include "qchill/parallel.hpp"
#include "qchill/mcwf.hpp"
#include "qchill/sweep.hpp"
#include "qchill/io.hpp"
#include "qchill/runner.hpp"
