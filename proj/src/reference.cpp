#include "tuplespec/reference.hpp"

namespace tuplespec::ref {

const std::array<CorpusRow, 5> kCorpusTable = {{
    {"wiki_test", 4670, 10635, 1015, 9.5},
    {"wiki_train", 19630, 45931, 4110, 8.9},
    {"sci_test", 6669, 11403, 1569, 13.8},
    {"sci_train", 19193, 33197, 4337, 13.1},
    {"total", 50162, 101166, 11031, 10.9},
}};

const std::array<DifficultyRow, 5> kDifficultyBySubset = {{
    {"wiki_test", 1015, 20.0, 23.6, 56.4},
    {"wiki_train", 4110, 20.0, 22.3, 57.6},
    {"sci_test", 1569, 22.2, 19.1, 58.8},
    {"sci_train", 4337, 22.7, 22.4, 54.9},
    {"total", 11031, 21.3, 22.0, 56.7},
}};

const std::array<TypeDifficultyCol, 6> kDifficultyByType = {{
    // The published can/easy percentage (36.1) disagrees with its own count
    // column (1,111 of 4,258 is 26.1); the printed value is kept verbatim.
    {"can", 1111, 36.1, 1404, 33.0, 1743, 40.9, 4258},
    {"might", 114, 3.9, 104, 3.6, 2676, 92.5, 2894},
    {"will", 512, 36.3, 384, 27.2, 516, 36.5, 1412},
    {"should", 84, 8.1, 108, 10.4, 845, 81.5, 1037},
    {"would", 349, 39.7, 267, 30.3, 264, 30.0, 880},
    {"had", 189, 34.4, 162, 29.5, 198, 36.1, 549},
}};

const std::array<BinaryResultRow, 12> kBinaryResults = {{
    {"modal", 79.6, 66.6, 70.6, 67.4, 35.7, 46.6, 99.8, 59.9, 3.6},
    {"top10", 79.3, 72.3, 75.1, 65.4, 48.0, 55.4, 99.8, 60.8, 24.5},
    {"top20", 77.8, 72.2, 74.6, 62.4, 48.4, 54.5, 99.8, 60.8, 25.3},
    {"top30", 77.4, 72.2, 74.4, 61.6, 48.5, 54.3, 99.8, 60.8, 25.5},
    {"sem_sentence", 86.6, 72.0, 76.9, 80.0, 45.6, 58.1, 99.8, 46.4, 25.6},
    {"sem_tuple", 84.0, 73.2, 77.1, 76.0, 47.9, 58.8, 99.8, 57.6, 23.2},
    {"sem_relation", 84.5, 73.1, 77.3, 75.7, 48.3, 59.0, 99.8, 64.4, 23.4},
    {"syn_sub", 72.3, 70.2, 71.0, 53.2, 46.6, 49.7, 95.4, 41.0, 35.5},
    {"syn_full", 72.8, 70.0, 71.2, 54.3, 46.2, 49.9, 95.6, 42.5, 34.7},
    {"sem_sent+syn_full", 82.4, 74.0, 77.8, 70.5, 52.3, 60.1, 99.8, 58.0, 32.8},
    {"sem_rel+syn_full", 81.1, 75.4, 78.3, 67.2, 57.0, 61.7, 100.0, 62.3, 37.5},
    {"oie_spec", 80.7, 77.5, 79.0, 66.9, 58.9, 62.6, 100.0, 67.2, 40.9},
}};

const BinaryResultRow* find_binary_result(const std::string& row) {
  for (const auto& r : kBinaryResults)
    if (row == r.row) return &r;
  return nullptr;
}

const std::array<MulticlassRow, 8> kMulticlassResults = {{
    {"non_spec", 19456, 93.5, 97.7, 95.6},
    {"spec", 2616, 66.7, 46.6, 54.9},
    {"can", 1003, 87.6, 47.9, 61.9},
    {"might", 720, 53.9, 39.0, 45.3},
    {"will", 339, 82.4, 59.3, 69.0},
    {"should", 283, 39.4, 56.2, 46.3},
    {"would", 170, 85.3, 37.6, 52.2},
    {"had", 101, 94.4, 33.7, 49.6},
}};

}  // namespace tuplespec::ref
