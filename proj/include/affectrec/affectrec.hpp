// Copyright 2026 The affectrec Authors. All Rights Reserved.
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

#pragma once

// Umbrella header. The HTTP binding (service/http.hpp) is not included here
// because it pulls in the HTTP server.

#include "affectrec/affect.hpp"
#include "affectrec/binary_io.hpp"
#include "affectrec/catalog/loader.hpp"
#include "affectrec/catalog/matrix_file.hpp"
#include "affectrec/catalog/preprocess.hpp"
#include "affectrec/catalog/record.hpp"
#include "affectrec/catalog/scaler.hpp"
#include "affectrec/catalog/synth.hpp"
#include "affectrec/engine/build.hpp"
#include "affectrec/engine/index.hpp"
#include "affectrec/engine/mozart.hpp"
#include "affectrec/engine/recommend.hpp"
#include "affectrec/error.hpp"
#include "affectrec/evaluation.hpp"
#include "affectrec/neural/checkpoint.hpp"
#include "affectrec/neural/gradient_check.hpp"
#include "affectrec/neural/loss.hpp"
#include "affectrec/neural/mlp.hpp"
#include "affectrec/neural/optimizer.hpp"
#include "affectrec/neural/trainer.hpp"
#include "affectrec/service/service.hpp"
#include "affectrec/service/session.hpp"
