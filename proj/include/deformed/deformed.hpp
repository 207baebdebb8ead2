// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "deformed/bounds.hpp"
#include "deformed/distributions.hpp"
#include "deformed/errors.hpp"
#include "deformed/fisher.hpp"
#include "deformed/functionals.hpp"
#include "deformed/io.hpp"
#include "deformed/log_family.hpp"
#include "deformed/numerics.hpp"
#include "deformed/scan.hpp"
