#pragma once

#include "licremedy/detector.hpp"
#include "licremedy/error.hpp"
#include "licremedy/index.hpp"
#include "licremedy/license_info.hpp"
#include "licremedy/licensing.hpp"
#include "licremedy/model.hpp"
#include "licremedy/registry.hpp"
#include "licremedy/remediator.hpp"
#include "licremedy/report.hpp"
#include "licremedy/resolver.hpp"
#include "licremedy/version.hpp"
