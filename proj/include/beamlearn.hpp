// SPDX-License-Identifier: Apache-2.0
//
// beamlearn: decentralized interference-aware beam codebook learning
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#ifndef BEAMLEARN_HPP
#define BEAMLEARN_HPP

#include "beamlearn/agent.hpp"
#include "beamlearn/cache.hpp"
#include "beamlearn/clustering.hpp"
#include "beamlearn/codebook.hpp"
#include "beamlearn/common.hpp"
#include "beamlearn/config.hpp"
#include "beamlearn/dataset.hpp"
#include "beamlearn/eval.hpp"
#include "beamlearn/geometry.hpp"
#include "beamlearn/io.hpp"
#include "beamlearn/linalg.hpp"
#include "beamlearn/measurement.hpp"
#include "beamlearn/orchestrator.hpp"
#include "beamlearn/policy.hpp"
#include "beamlearn/scenario.hpp"
#include "beamlearn/theory.hpp"
#include "beamlearn/theory_audit.hpp"
#include "beamlearn/value_estimator.hpp"

#endif
