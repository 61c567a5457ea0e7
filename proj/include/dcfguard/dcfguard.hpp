#pragma once

#include "dcfguard/analytics.hpp"
#include "dcfguard/config.hpp"
#include "dcfguard/controller.hpp"
#include "dcfguard/csv.hpp"
#include "dcfguard/curves.hpp"
#include "dcfguard/error.hpp"
#include "dcfguard/phy.hpp"
#include "dcfguard/policy.hpp"
#include "dcfguard/presets.hpp"
#include "dcfguard/random.hpp"
#include "dcfguard/robustness.hpp"
#include "dcfguard/scenario.hpp"
#include "dcfguard/sim.hpp"
#include "dcfguard/sweep.hpp"
