#pragma once

#include <string>
#include <vector>

#include "star/errors.hpp"
#include "star/hypergraph.hpp"
#include "star/program.hpp"
#include "star/qagen.hpp"
#include "star/vocabulary.hpp"

namespace star {

// Generation produced options that are not uniquely decidable — a bug in
// the question, not in the caller.
class AmbiguityError : public Error {
public:
    using Error::Error;
};

// Result of the naive reference evaluation. Set contents are sorted and
// deduplicated; triplets are flattened to "subject|predicate|object|frame"
// strings.
struct OracleValue {
    ValueType type = ValueType::ActionSet;
    std::vector<std::string> elements;
    bool boolean = false;
    bool unanswerable = false;
};

// Reference evaluation of a program by plain exhaustive scans over the
// graph's actions, entities and triplets. Shares the data model and parser
// with the executor but none of its evaluation code; the harness uses it
// as the second route of every cross-implementation check.
OracleValue oracle_evaluate(const FunctionalProgram& p, const SituationHypergraph& graph,
                            const Vocabulary& voc);

// Answers a generated item from the unmasked ground-truth graph by
// enumerating graph facts and testing each option's components against the
// question's result set. Throws AmbiguityError unless exactly one option
// is consistent.
int brute_force_oracle(const QAItem& item, const SituationHypergraph& gt, const Vocabulary& voc);

}  // namespace star
