#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "swsr/embedding_io.hpp"
#include "swsr/evalsuite.hpp"

namespace swsr::testing {

struct ToyTask {
  Vocabulary vocab;
  Matrix embeddings;  // dim x |V|
  LabeledCorpus corpus;
};

// Two word clusters centred at +separation and -separation on every axis;
// each document draws its tokens from its own class's cluster.
inline ToyTask make_separable_task(std::uint64_t seed, std::size_t docs = 300,
                                   double separation = 3.0, std::size_t dim = 5,
                                   std::size_t words_per_class = 20) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  ToyTask task;
  task.embeddings = Matrix(dim, 2 * words_per_class);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t w = 0; w < words_per_class; ++w) {
      const std::size_t col = c * words_per_class + w;
      task.vocab.add("c" + std::to_string(c) + "_" + std::to_string(w));
      for (std::size_t r = 0; r < dim; ++r)
        task.embeddings(r, col) = (c == 0 ? separation : -separation) + noise(rng);
    }
  task.corpus.classes = {"pos", "neg"};
  std::uniform_int_distribution<std::size_t> pick(0, words_per_class - 1);
  std::uniform_int_distribution<std::size_t> length(3, 8);
  for (std::size_t d = 0; d < docs; ++d) {
    LabeledDocument doc;
    doc.label = d % 2;
    doc.line = d + 1;
    const std::size_t len = length(rng);
    for (std::size_t t = 0; t < len; ++t)
      doc.tokens.push_back(task.vocab.word(doc.label * words_per_class + pick(rng)));
    task.corpus.documents.push_back(std::move(doc));
  }
  return task;
}

// Same documents with labels replaced by a balanced random assignment.
inline ToyTask shuffle_labels(ToyTask task, std::uint64_t seed) {
  std::vector<std::size_t> labels;
  for (std::size_t i = 0; i < task.corpus.documents.size(); ++i) labels.push_back(i % 2);
  std::mt19937_64 rng(seed);
  std::shuffle(labels.begin(), labels.end(), rng);
  for (std::size_t i = 0; i < labels.size(); ++i) task.corpus.documents[i].label = labels[i];
  return task;
}

}  // namespace swsr::testing
