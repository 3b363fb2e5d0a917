/* Copyright 2026 The kernelscope Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include "kernelscope/corpus.hpp"
#include "kernelscope/distort.hpp"
#include "kernelscope/inference.hpp"
#include "kernelscope/intelligence.hpp"
#include "kernelscope/report.hpp"
#include "kernelscope/serialize.hpp"
#include "kernelscope/similarity.hpp"
#include "kernelscope/transplant.hpp"
#include "kernelscope/weightstore.hpp"
