#pragma once

#include "illposed/error.hpp"
#include "illposed/linops.hpp"
#include "illposed/problems.hpp"
#include "illposed/variational.hpp"
#include "illposed/quasisol.hpp"
#include "illposed/landweber.hpp"
#include "illposed/dsm.hpp"
#include "illposed/harness.hpp"
