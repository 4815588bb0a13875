#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "subchar/nmt/model.h"
#include "subchar/nmt/vocab.h"

namespace subchar::nmt {

/// Model plus the vocabularies it was trained with.
struct Checkpoint {
  Seq2SeqModel model;
  Vocab src_vocab;
  Vocab tgt_vocab;
  int64_t step = 0;
};

// Line-oriented text container. Tensors are written as hex floats so a
// save/load round trip is bit exact.
void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace subchar::nmt
