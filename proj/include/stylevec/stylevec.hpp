/*
 * Copyright 2026 The stylevec Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "stylevec/common.hpp"
#include "stylevec/context.hpp"
#include "stylevec/corpus.hpp"
#include "stylevec/eval.hpp"
#include "stylevec/io.hpp"
#include "stylevec/model.hpp"
#include "stylevec/synthgen.hpp"
#include "stylevec/trainer.hpp"
#include "stylevec/vectors.hpp"
