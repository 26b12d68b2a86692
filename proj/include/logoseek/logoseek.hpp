// Copyright (C) 2026 The logoseek authors
//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "logoseek/dataset.hpp"
#include "logoseek/errors.hpp"
#include "logoseek/eval.hpp"
#include "logoseek/features.hpp"
#include "logoseek/geometry.hpp"
#include "logoseek/image.hpp"
#include "logoseek/retrieval.hpp"
#include "logoseek/textio.hpp"
#include "logoseek/voc.hpp"
