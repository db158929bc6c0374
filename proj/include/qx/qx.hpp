// Copyright 2026 The QX Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QX_QX_HPP_
#define QX_QX_HPP_

#include "qx/embedding.hpp"
#include "qx/error.hpp"
#include "qx/fusion.hpp"
#include "qx/io.hpp"
#include "qx/metrics.hpp"
#include "qx/parallel.hpp"
#include "qx/rocchio.hpp"
#include "qx/scoring.hpp"
#include "qx/synthetic.hpp"
#include "qx/trial.hpp"

#endif  // QX_QX_HPP_
