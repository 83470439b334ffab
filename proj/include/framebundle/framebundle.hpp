// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "framebundle/catalog.hpp"
#include "framebundle/gauss_map.hpp"
#include "framebundle/spec_file.hpp"
#include "framebundle/verify.hpp"
