// Copyright 2026 The HFCF Authors
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

#include "hfcf/bdct.hpp"
#include "hfcf/colordesc.hpp"
#include "hfcf/error.hpp"
#include "hfcf/fusion.hpp"
#include "hfcf/gallery.hpp"
#include "hfcf/pipeline.hpp"
#include "hfcf/polyprotect.hpp"
#include "hfcf/privmetrics.hpp"
#include "hfcf/smpc/fixed_point.hpp"
#include "hfcf/smpc/session.hpp"
#include "hfcf/smpc/sharing.hpp"
#include "hfcf/smpc/transport.hpp"
#include "hfcf/smpc/wire.hpp"
#include "hfcf/tensorio.hpp"
