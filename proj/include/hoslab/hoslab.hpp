#pragma once

#include "hoslab/bump.hpp"
#include "hoslab/decay.hpp"
#include "hoslab/io.hpp"
#include "hoslab/linalg.hpp"
#include "hoslab/oscillatory.hpp"
#include "hoslab/partition.hpp"
#include "hoslab/quadrature.hpp"
#include "hoslab/spectral.hpp"
#include "hoslab/sphere.hpp"
#include "hoslab/symbol.hpp"
#include "hoslab/version.hpp"
