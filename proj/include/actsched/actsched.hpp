/*
 Copyright 2026 The actsched Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef ACTSCHED_ACTSCHED_HPP
#define ACTSCHED_ACTSCHED_HPP

#include "actsched/error.hpp"
#include "actsched/linalg.hpp"
#include "actsched/gramian.hpp"
#include "actsched/rearrange.hpp"
#include "actsched/scheduler.hpp"
#include "actsched/oracle.hpp"

#endif  // ACTSCHED_ACTSCHED_HPP
