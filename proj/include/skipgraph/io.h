/**
 * Copyright 2026 The skipgraph Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SKIPGRAPH_IO_H_
#define SKIPGRAPH_IO_H_

#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "skipgraph/corpus.h"
#include "skipgraph/engine.h"
#include "skipgraph/model.h"

namespace skipgraph {

// Text embedding format: a "rows dim" header, then one line per row holding
// the token and dim floats (shortest round-trip form).
void write_embeddings(std::ostream &out, const Vocabulary &vocab, const Model &model,
                      Label which = Label::kEmbedding);

struct LoadedEmbeddings {
  Vocabulary vocab;  // frequencies are unknown and read as zero
  Model model;       // the stored rows land in the embedding table
};

LoadedEmbeddings read_embeddings(std::istream &in);

// "token<TAB>frequency" per line in id order.
void write_vocabulary(std::ostream &out, const Vocabulary &vocab);
Vocabulary read_vocabulary(std::istream &in, std::uint64_t min_count = 1);

// One row per epoch x round after a "#v1" line and the column header.
void write_metrics_csv(std::ostream &out, const RunConfig &config, const RunMetrics &metrics);

// Flat key=value file; keys are unique and written sorted.
using Manifest = std::map<std::string, std::string>;

void write_manifest(std::ostream &out, const Manifest &manifest);
Manifest read_manifest(std::istream &in);

}  // namespace skipgraph

#endif  // SKIPGRAPH_IO_H_
