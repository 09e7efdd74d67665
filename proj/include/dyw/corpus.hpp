// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef DYW_CORPUS_HPP_
#define DYW_CORPUS_HPP_

#include <optional>
#include <string>
#include <vector>

namespace dyw::corpus {

struct ExpectedQuery {
    std::string query;  // textual query form, e.g. "confidentiality? m1"
    bool violated = false;
};

struct FixtureEvent {
    std::string kind;        // "mutate" or "leak"
    int message_index = -1;  // only meaningful for mutate
    std::string slot;        // slot name / leaked identifier
};

/// Reference attack shape for a violated query: the mutation and leak events
/// that must appear (as a subsequence) in the minimal trace the engine finds.
struct TraceFixture {
    std::string query;
    std::vector<FixtureEvent> events;
    std::vector<std::string> derivation_contains;  // substrings of the rendered proof
};

struct CorpusEntry {
    std::string path;  // canonical path, e.g. "models/olm_signed.dym"
    std::string description;
    std::string section;
    std::string attacker;  // "active" or "passive"
    std::vector<ExpectedQuery> queries;
    std::string source;  // embedded model text
    std::vector<TraceFixture> fixtures;
};

/// The built-in model corpus with its expected verdicts, embedded at build
/// time from models/.
const std::vector<CorpusEntry>& corpus();

const CorpusEntry* find_entry(const std::string& path);

/// Stored reference trace for a query expected to be violated; nullptr when
/// no fixture ships for it.
const TraceFixture* expected_trace(const CorpusEntry& entry, const std::string& query);

/// Raw embedded file content (model sources, corpus.json, fixtures);
/// nullopt for unknown paths.
std::optional<std::string> embedded_file(const std::string& path);

}  // namespace dyw::corpus

#endif  // DYW_CORPUS_HPP_
