// Copyright 2026 The gruscreen Authors. All Rights Reserved.
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

// Umbrella header. The HTTP binding (service/http_api.hpp) is left out; it
// pulls in cpp-httplib.

#include "gruscreen/error.hpp"
#include "gruscreen/metrics/confusion.hpp"
#include "gruscreen/metrics/report.hpp"
#include "gruscreen/metrics/stats.hpp"
#include "gruscreen/nn/adam.hpp"
#include "gruscreen/nn/config.hpp"
#include "gruscreen/nn/gru.hpp"
#include "gruscreen/nn/init.hpp"
#include "gruscreen/nn/loss.hpp"
#include "gruscreen/nn/model.hpp"
#include "gruscreen/nn/param_count.hpp"
#include "gruscreen/nn/pretrained.hpp"
#include "gruscreen/service/chat_service.hpp"
#include "gruscreen/service/detector.hpp"
#include "gruscreen/service/question_bank.hpp"
#include "gruscreen/service/risk.hpp"
#include "gruscreen/service/session.hpp"
#include "gruscreen/store/archive.hpp"
#include "gruscreen/text/clean.hpp"
#include "gruscreen/text/corpus.hpp"
#include "gruscreen/text/csv.hpp"
#include "gruscreen/text/encode.hpp"
#include "gruscreen/text/vocabulary.hpp"
#include "gruscreen/train/early_stopping.hpp"
#include "gruscreen/train/history.hpp"
#include "gruscreen/train/pipeline.hpp"
#include "gruscreen/train/split.hpp"
#include "gruscreen/train/synthetic.hpp"
#include "gruscreen/train/trainer.hpp"
