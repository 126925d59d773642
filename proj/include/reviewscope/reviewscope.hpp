/*
 * Copyright 2026 The reviewscope Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "reviewscope/error.hpp"
#include "reviewscope/time.hpp"
#include "reviewscope/io.hpp"
#include "reviewscope/review_ingest.hpp"
#include "reviewscope/segmentation.hpp"
#include "reviewscope/textproc.hpp"
#include "reviewscope/vsm.hpp"
#include "reviewscope/clustering.hpp"
#include "reviewscope/code_extract.hpp"
#include "reviewscope/localization.hpp"
#include "reviewscope/evaluation.hpp"
#include "reviewscope/config.hpp"
#include "reviewscope/pipeline.hpp"
