#include "tuplespec/metrics.hpp"

#include "tuplespec/errors.hpp"

namespace tuplespec {

namespace {

Score score_from_counts(int64_t tp, int64_t fp, int64_t fn) {
  Score s;
  s.precision = (tp + fp) > 0 ? 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  s.recall = (tp + fn) > 0 ? 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  s.f1 = (s.precision + s.recall) > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

void fill_recall_by_difficulty(EvalReport& report, const std::vector<int>& preds,
                               const std::vector<int>& golds,
                               const std::vector<std::optional<DifficultyLevel>>& difficulties) {
  if (difficulties.empty()) return;
  if (difficulties.size() != preds.size())
    throw RuntimeFailure("difficulty vector does not match prediction vector");
  int64_t correct[3] = {0, 0, 0};
  int64_t gold[3] = {0, 0, 0};
  for (size_t i = 0; i < preds.size(); ++i) {
    if (golds[i] == 0) {
      if (difficulties[i])
        throw RuntimeFailure("difficulty level given for a non-speculative instance");
      continue;
    }
    if (!difficulties[i])
      throw RuntimeFailure("missing difficulty level for a speculative instance");
    size_t d = static_cast<size_t>(*difficulties[i]);
    gold[d]++;
    if (preds[i] == golds[i]) correct[d]++;
  }
  for (size_t d = 0; d < 3; ++d) {
    report.difficulty_gold_counts[d] = gold[d];
    report.recall_by_difficulty[d] =
        gold[d] > 0 ? 100.0 * static_cast<double>(correct[d]) / static_cast<double>(gold[d]) : 0.0;
  }
  report.has_difficulty = true;
}

}  // namespace

EvalReport score_binary(const std::vector<int>& preds, const std::vector<int>& golds,
                        const std::vector<std::optional<DifficultyLevel>>& difficulties) {
  if (preds.size() != golds.size())
    throw RuntimeFailure("prediction vector does not match gold vector");
  EvalReport report;
  report.multiclass = false;
  report.n_instances = static_cast<int64_t>(preds.size());

  int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (size_t i = 0; i < preds.size(); ++i) {
    bool p = preds[i] != 0;
    bool g = golds[i] != 0;
    if (p && g) tp++;
    else if (p && !g) fp++;
    else if (!p && g) fn++;
    else tn++;
  }
  report.positive = score_from_counts(tp, fp, fn);
  report.negative = score_from_counts(tn, fn, fp);
  report.macro.precision = 0.5 * (report.positive.precision + report.negative.precision);
  report.macro.recall = 0.5 * (report.positive.recall + report.negative.recall);
  report.macro.f1 = 0.5 * (report.positive.f1 + report.negative.f1);

  // For difficulty recall a binary prediction counts as correct on any
  // speculative gold whenever it predicts the positive class.
  std::vector<int> bin_preds(preds.size());
  std::vector<int> bin_golds(golds.size());
  for (size_t i = 0; i < preds.size(); ++i) {
    bin_preds[i] = preds[i] != 0 ? 1 : 0;
    bin_golds[i] = golds[i] != 0 ? 1 : 0;
  }
  fill_recall_by_difficulty(report, bin_preds, bin_golds, difficulties);
  return report;
}

std::array<double, 3> recall_by_difficulty(
    const std::vector<int>& preds, const std::vector<int>& golds,
    const std::vector<std::optional<DifficultyLevel>>& levels) {
  EvalReport scratch;
  fill_recall_by_difficulty(scratch, preds, golds, levels);
  return scratch.recall_by_difficulty;
}

EvalReport score_multiclass(const std::vector<int>& preds, const std::vector<int>& golds,
                            const std::vector<std::optional<DifficultyLevel>>& difficulties) {
  if (preds.size() != golds.size())
    throw RuntimeFailure("prediction vector does not match gold vector");
  EvalReport report;
  report.multiclass = true;
  report.n_instances = static_cast<int64_t>(preds.size());

  int64_t tp[kNumSpeculationClasses] = {0};
  int64_t fp[kNumSpeculationClasses] = {0};
  int64_t fn[kNumSpeculationClasses] = {0};
  for (size_t i = 0; i < preds.size(); ++i) {
    int p = preds[i];
    int g = golds[i];
    if (p < 0 || p >= kNumSpeculationClasses || g < 0 || g >= kNumSpeculationClasses)
      throw RuntimeFailure("class id out of range");
    if (p == g) {
      tp[p]++;
    } else {
      fp[p]++;
      fn[g]++;
    }
    report.class_gold_counts[static_cast<size_t>(g)]++;
  }

  double psum = 0.0, rsum = 0.0, fsum = 0.0;
  for (int c = 0; c < kNumSpeculationClasses; ++c) {
    report.per_class[static_cast<size_t>(c)] = score_from_counts(tp[c], fp[c], fn[c]);
    psum += report.per_class[static_cast<size_t>(c)].precision;
    rsum += report.per_class[static_cast<size_t>(c)].recall;
    fsum += report.per_class[static_cast<size_t>(c)].f1;
  }
  // Macro scores average over all seven classes whether or not a class occurs
  // in the gold labels; an absent class contributes zero.
  report.macro.precision = psum / kNumSpeculationClasses;
  report.macro.recall = rsum / kNumSpeculationClasses;
  report.macro.f1 = fsum / kNumSpeculationClasses;

  // Positive block: collapse all speculative classes against NONE.
  std::vector<int> bp(preds.size()), bg(golds.size());
  for (size_t i = 0; i < preds.size(); ++i) {
    bp[i] = preds[i] != 0 ? 1 : 0;
    bg[i] = golds[i] != 0 ? 1 : 0;
  }
  int64_t btp = 0, bfp = 0, bfn = 0, btn = 0;
  for (size_t i = 0; i < bp.size(); ++i) {
    if (bp[i] && bg[i]) btp++;
    else if (bp[i] && !bg[i]) bfp++;
    else if (!bp[i] && bg[i]) bfn++;
    else btn++;
  }
  report.positive = score_from_counts(btp, bfp, bfn);
  report.negative = score_from_counts(btn, bfn, bfp);

  // In multi-class mode a speculative instance only counts toward difficulty
  // recall when the exact modal class is recovered.
  fill_recall_by_difficulty(report, preds, golds, difficulties);
  return report;
}

}  // namespace tuplespec
