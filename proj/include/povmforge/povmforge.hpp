/*
 * This code is part of povm-forge.
 *
 * (C) Copyright 2026 povm-forge contributors.
 *
 * Licensed under the Apache License, Version 2.0; see the LICENSE file in
 * the repository root or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include "povmforge/analysis.hpp"
#include "povmforge/channels.hpp"
#include "povmforge/commands.hpp"
#include "povmforge/dilation.hpp"
#include "povmforge/errors.hpp"
#include "povmforge/feasibility.hpp"
#include "povmforge/io.hpp"
#include "povmforge/matrix.hpp"
#include "povmforge/observables.hpp"
#include "povmforge/random.hpp"
#include "povmforge/realization.hpp"
