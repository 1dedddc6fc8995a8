/*
 Copyright 2026 The hcpa Authors

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

#ifndef HCPA_HCPA_HPP
#define HCPA_HCPA_HPP

#include "hcpa/burgers.hpp"
#include "hcpa/contract.hpp"
#include "hcpa/errors.hpp"
#include "hcpa/feedback_pde.hpp"
#include "hcpa/model.hpp"
#include "hcpa/ode.hpp"
#include "hcpa/riccati.hpp"
#include "hcpa/simulate.hpp"

#endif  // HCPA_HCPA_HPP
