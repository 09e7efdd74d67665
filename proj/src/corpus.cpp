// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "dyw/corpus.hpp"

#include <cstddef>
#include <mutex>
#include <stdexcept>

#include <json.hpp>

namespace dyw::corpus {

namespace detail {
struct RawFile {
    const char* path;
    const char* content;
};
extern const RawFile kFiles[];
extern const std::size_t kFileCount;
}  // namespace detail

std::optional<std::string> embedded_file(const std::string& path) {
    for (std::size_t i = 0; i < detail::kFileCount; ++i)
        if (path == detail::kFiles[i].path) return std::string(detail::kFiles[i].content);
    return std::nullopt;
}

namespace {

std::string first_comment_line(const std::string& source) {
    std::size_t pos = source.find("//");
    if (pos == std::string::npos) return {};
    std::size_t end = source.find('\n', pos);
    std::string line = source.substr(pos + 2, end == std::string::npos ? end : end - pos - 2);
    while (!line.empty() && line.front() == ' ') line.erase(line.begin());
    return line;
}

std::vector<CorpusEntry> load_corpus() {
    auto manifest = embedded_file("models/corpus.json");
    if (!manifest) throw std::runtime_error("embedded corpus manifest missing");
    nlohmann::json j = nlohmann::json::parse(*manifest);

    std::vector<CorpusEntry> entries;
    for (const auto& je : j) {
        CorpusEntry entry;
        entry.path = je.at("path").get<std::string>();
        entry.section = je.at("section").get<std::string>();
        entry.attacker = je.at("attacker").get<std::string>();
        for (const auto& q : je.at("queries")) {
            ExpectedQuery eq;
            eq.query = q.at("query").get<std::string>();
            eq.violated = q.at("expected").get<std::string>() == "violated";
            entry.queries.push_back(std::move(eq));
        }
        auto source = embedded_file(entry.path);
        if (!source) throw std::runtime_error("corpus manifest names missing model " + entry.path);
        entry.source = *source;
        entry.description = first_comment_line(entry.source);
        entries.push_back(std::move(entry));
    }

    // Attach any shipped trace fixtures to their entries.
    for (std::size_t i = 0; i < detail::kFileCount; ++i) {
        std::string path = detail::kFiles[i].path;
        if (path.rfind("models/fixtures/", 0) != 0) continue;
        nlohmann::json jf = nlohmann::json::parse(detail::kFiles[i].content);
        std::string model = jf.at("model").get<std::string>();
        for (auto& entry : entries) {
            if (entry.path != model) continue;
            TraceFixture fixture;
            fixture.query = jf.at("query").get<std::string>();
            for (const auto& ev : jf.at("events")) {
                FixtureEvent fe;
                fe.kind = ev.at("kind").get<std::string>();
                fe.slot = ev.at("slot").get<std::string>();
                fe.message_index = ev.value("message_index", -1);
                fixture.events.push_back(std::move(fe));
            }
            if (jf.contains("derivation_contains"))
                for (const auto& s : jf.at("derivation_contains"))
                    fixture.derivation_contains.push_back(s.get<std::string>());
            entry.fixtures.push_back(std::move(fixture));
        }
    }
    return entries;
}

}  // namespace

const std::vector<CorpusEntry>& corpus() {
    static const std::vector<CorpusEntry> entries = load_corpus();
    return entries;
}

const CorpusEntry* find_entry(const std::string& path) {
    for (const auto& e : corpus())
        if (e.path == path) return &e;
    return nullptr;
}

const TraceFixture* expected_trace(const CorpusEntry& entry, const std::string& query) {
    for (const auto& f : entry.fixtures)
        if (f.query == query) return &f;
    return nullptr;
}

}  // namespace dyw::corpus
