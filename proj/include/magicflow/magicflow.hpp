// Copyright 2026 Magicflow Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "magicflow/common.hpp"
#include "magicflow/phase_space.hpp"
#include "magicflow/operators.hpp"
#include "magicflow/clifford.hpp"
#include "magicflow/convolution.hpp"
#include "magicflow/magic.hpp"
#include "magicflow/states.hpp"
#include "magicflow/io.hpp"
#include "magicflow/verify.hpp"
