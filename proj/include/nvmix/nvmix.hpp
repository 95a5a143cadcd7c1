#pragma once

#include "nvmix/errors.hpp"
#include "nvmix/format.hpp"
#include "nvmix/identities.hpp"
#include "nvmix/io.hpp"
#include "nvmix/mixtures.hpp"
#include "nvmix/quadrature.hpp"
#include "nvmix/random.hpp"
#include "nvmix/special_functions.hpp"
