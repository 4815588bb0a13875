#pragma once

#include <vector>

#include "subchar/nmt/model.h"

namespace subchar::nmt {

struct TranslateOptions {
  int beam = 0;  // 0 or 1: greedy
  int max_len = 100;
};

/// Target ids without the end-of-sentence marker. An empty source yields an
/// empty target. Padding and begin-of-sentence are never emitted.
std::vector<int> greedy_decode(const Seq2SeqModel& model, const std::vector<int>& src, int max_len);

/// Highest log-probability completed hypothesis. Candidates tie-break by
/// parent order then token id, so width 1 reproduces greedy_decode.
std::vector<int> beam_decode(const Seq2SeqModel& model, const std::vector<int>& src, int width,
                             int max_len);

std::vector<int> translate(const Seq2SeqModel& model, const std::vector<int>& src,
                           const TranslateOptions& options = {});

}  // namespace subchar::nmt
