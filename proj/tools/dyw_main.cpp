// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "dyw/corpus.hpp"
#include "dyw/dsl.hpp"
#include "dyw/engine.hpp"
#include "dyw/ratchet.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string verdict_line(const dyw::engine::Verdict& v) {
    return std::string(v.violated ? "VIOLATED " : "PROVED   ") + dyw::dsl::to_string(v.query);
}

void print_trace_text(const dyw::engine::Verdict& v, std::ostream& os) {
    for (const auto& ev : v.trace) {
        switch (ev.kind) {
            case dyw::engine::TraceEvent::Kind::Mutate:
                os << "    [phase " << ev.phase << "] replaces " << ev.slot << " with "
                   << dyw::term::render(ev.t) << " in message " << ev.message_index << "\n";
                break;
            case dyw::engine::TraceEvent::Kind::Leak:
                os << "    [phase " << ev.phase << "] " << ev.principal << " leaks " << ev.slot
                   << "\n";
                break;
            case dyw::engine::TraceEvent::Kind::Derive:
                os << "    derives " << ev.slot << " = " << dyw::term::render(ev.t) << "\n";
                break;
            case dyw::engine::TraceEvent::Kind::Observe:
                break;  // observations are in the JSON trace; text stays narrative
        }
    }
    if (v.derivation) {
        std::istringstream tree(dyw::engine::render(*v.derivation));
        std::string line;
        while (std::getline(tree, line)) os << "      " << line << "\n";
    }
}

struct AnalyzeOutcome {
    int exit_code = kExitOk;
    std::vector<dyw::engine::Verdict> verdicts;
    std::string error;
};

AnalyzeOutcome analyze_source(const std::string& source, const dyw::engine::Options& opts) {
    AnalyzeOutcome out;
    auto parsed = dyw::dsl::parse(source);
    if (!parsed.ok()) {
        out.exit_code = kExitInput;
        out.error = dyw::format(parsed.diagnostics);
        return out;
    }
    try {
        out.verdicts = dyw::engine::analyze(*parsed.ast, opts);
    } catch (const dyw::engine::AnalysisError& e) {
        out.exit_code = e.stage == "derivability" ? kExitBudget : kExitInput;
        out.error = e.what();
    } catch (const dyw::InconclusiveError& e) {
        out.exit_code = kExitBudget;
        out.error = e.what();
    } catch (const dyw::StrategyCapError& e) {
        out.exit_code = kExitBudget;
        out.error = e.what();
    }
    return out;
}

int run_analyze(const std::string& path, const std::string& format,
                const dyw::engine::Options& opts) {
    auto source = read_file(path);
    if (!source) {
        std::cerr << "cannot read model file: " << path << "\n";
        return kExitInput;
    }
    auto outcome = analyze_source(*source, opts);
    if (outcome.exit_code != kExitOk) {
        std::cerr << outcome.error;
        if (!outcome.error.empty() && outcome.error.back() != '\n') std::cerr << "\n";
        return outcome.exit_code;
    }
    if (format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& v : outcome.verdicts)
            arr.push_back(nlohmann::json::parse(dyw::engine::verdict_to_json(path, v)));
        std::cout << arr.dump(2) << "\n";
    } else {
        for (const auto& v : outcome.verdicts) {
            std::cout << verdict_line(v) << "\n";
            if (v.violated) print_trace_text(v, std::cout);
        }
    }
    return kExitOk;
}

unsigned worker_count() {
    if (const char* env = std::getenv("DYW_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<unsigned>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

struct CorpusRow {
    std::string path;
    std::string attacker;
    std::string source;
    bool missing = false;
    std::vector<dyw::corpus::ExpectedQuery> expected;
};

int run_corpus(const std::string& expect_path, const std::string& format,
               dyw::engine::Options opts) {
    std::vector<CorpusRow> rows;
    if (expect_path.empty()) {
        for (const auto& entry : dyw::corpus::corpus()) {
            CorpusRow row;
            row.path = entry.path;
            row.attacker = entry.attacker;
            row.source = entry.source;
            row.expected = entry.queries;
            rows.push_back(std::move(row));
        }
    } else {
        auto manifest = read_file(expect_path);
        if (!manifest) {
            std::cerr << "cannot read manifest: " << expect_path << "\n";
            return kExitInput;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(*manifest);
        } catch (const std::exception& e) {
            std::cerr << "malformed manifest: " << e.what() << "\n";
            return kExitInput;
        }
        auto base = std::filesystem::path(expect_path).parent_path();
        for (const auto& je : j) {
            CorpusRow row;
            row.path = je.at("path").get<std::string>();
            row.attacker = je.value("attacker", "active");
            for (const auto& q : je.at("queries"))
                row.expected.push_back({q.at("query").get<std::string>(),
                                        q.at("expected").get<std::string>() == "violated"});
            if (auto embedded = dyw::corpus::embedded_file(row.path)) {
                row.source = *embedded;
            } else if (auto file = read_file((base / row.path).string())) {
                row.source = *file;
            } else if (auto direct = read_file(row.path)) {
                row.source = *direct;
            } else {
                row.missing = true;
            }
            rows.push_back(std::move(row));
        }
    }

    struct RowResult {
        bool pass = false;
        int exit_code = kExitOk;
        std::string detail;
    };
    std::vector<RowResult> results(rows.size());

    auto evaluate = [&](std::size_t i) {
        const CorpusRow& row = rows[i];
        RowResult& res = results[i];
        if (row.missing) {
            res.exit_code = kExitInput;
            res.detail = "model file not found";
            return;
        }
        dyw::engine::Options row_opts = opts;
        if (row.attacker == "passive")
            row_opts.attacker_override = dyw::dsl::AttackerMode::Passive;
        auto outcome = analyze_source(row.source, row_opts);
        if (outcome.exit_code != kExitOk) {
            res.exit_code = outcome.exit_code;
            res.detail = outcome.error;
            return;
        }
        res.pass = true;
        for (const auto& expect : row.expected) {
            bool found = false;
            for (const auto& v : outcome.verdicts) {
                if (dyw::dsl::to_string(v.query) != expect.query) continue;
                found = true;
                if (v.violated != expect.violated) {
                    res.pass = false;
                    res.detail += expect.query + " expected " +
                                  (expect.violated ? "violated" : "proved") + ", got " +
                                  (v.violated ? "violated" : "proved") + "; ";
                }
            }
            if (!found) {
                res.pass = false;
                res.detail += expect.query + " not present in model; ";
            }
        }
    };

    unsigned workers = std::min<unsigned>(worker_count(), rows.empty() ? 1 : rows.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) evaluate(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1))
                    evaluate(i);
            });
        for (auto& t : pool) t.join();
    }

    // Report in manifest order regardless of completion order.
    int exit_code = kExitOk;
    std::size_t passed = 0;
    nlohmann::json report = nlohmann::json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& res = results[i];
        std::string status;
        if (res.exit_code != kExitOk) {
            status = "error";
            exit_code = res.exit_code;
        } else if (res.pass) {
            status = "pass";
            ++passed;
        } else {
            status = "fail";
            if (exit_code == kExitOk) exit_code = kExitMismatch;
        }
        if (format == "json") {
            nlohmann::json row;
            row["path"] = rows[i].path;
            row["status"] = status;
            row["detail"] = res.detail;
            report.push_back(std::move(row));
        } else if (status == "error") {
            std::cout << "ERROR " << rows[i].path << ": " << res.detail << "\n";
        } else if (status == "pass") {
            std::cout << "PASS  " << rows[i].path << " (" << rows[i].expected.size()
                      << " queries)\n";
        } else {
            std::cout << "FAIL  " << rows[i].path << ": " << res.detail << "\n";
        }
    }
    if (format == "json")
        std::cout << report.dump(2) << "\n";
    else
        std::cout << passed << "/" << rows.size() << " entries match\n";
    return exit_code;
}

std::string hex_bytes(const std::uint8_t* data, std::size_t n) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(digits[data[i] >> 4]);
        out.push_back(digits[data[i] & 0xf]);
    }
    return out;
}

int run_ratchet_demo(const std::string& seed_hex, std::vector<std::uint64_t> targets) {
    std::vector<std::uint8_t> seed;
    if (seed_hex.empty()) {
        std::random_device rd;
        std::mt19937_64 rng(rd());
        seed.resize(dyw::ratchet::kSeedSize);
        for (auto& b : seed) b = static_cast<std::uint8_t>(rng());
    } else {
        if (seed_hex.size() != dyw::ratchet::kSeedSize * 2) {
            std::cerr << "seed must be " << dyw::ratchet::kSeedSize * 2 << " hex characters\n";
            return kExitInput;
        }
        auto nibble = [](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            return -1;
        };
        for (std::size_t i = 0; i < seed_hex.size(); i += 2) {
            int hi = nibble(seed_hex[i]);
            int lo = nibble(seed_hex[i + 1]);
            if (hi < 0 || lo < 0) {
                std::cerr << "malformed hex seed\n";
                return kExitInput;
            }
            seed.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
        }
    }

    auto state = dyw::ratchet::init(seed);
    if (targets.empty()) targets.push_back(0);
    std::sort(targets.begin(), targets.end());
    for (std::uint64_t t : targets) {
        dyw::ratchet::AdvanceResult res;
        try {
            res = dyw::ratchet::advance(state, t);
        } catch (const dyw::ratchet::RatchetError& e) {
            std::cerr << e.what() << "\n";
            return kExitInput;
        }
        state = res.state;
        std::cout << "index " << state.index << " (hash ops: " << res.hash_ops << ")\n";
        for (std::size_t j = 0; j < dyw::ratchet::kParts; ++j)
            std::cout << "  R" << j << ": " << hex_bytes(state.parts[j].data(), 8) << "...\n";
        auto keys = dyw::ratchet::derive_message_keys(state);
        std::cout << "  cipher_key: " << hex_bytes(keys.cipher_key.data(), keys.cipher_key.size())
                  << "\n  mac_key:    " << hex_bytes(keys.mac_key.data(), keys.mac_key.size())
                  << "\n  iv:         " << hex_bytes(keys.iv.data(), keys.iv.size()) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dyw - symbolic protocol analysis workbench"};
    app.require_subcommand(1);

    dyw::engine::Options opts;
    std::string format = "text";
    std::string attacker;

    auto* analyze = app.add_subcommand("analyze", "Analyze a protocol model file");
    std::string model_path;
    analyze->add_option("model", model_path, "Path to a .dym model")->required();
    analyze->add_option("--format", format, "Output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    analyze->add_option("--attacker", attacker, "Override the attacker mode")
        ->check(CLI::IsMember({"active", "passive"}));
    analyze->add_option("--strategy-cap", opts.strategy_cap, "Active strategy-space cap");
    analyze->add_option("--budget", opts.derivation_budget, "Derivability search node budget");
    analyze->add_option("--max-mutations", opts.max_mutations,
                        "Mutated slots per attacker strategy");

    auto* corpus_cmd = app.add_subcommand("corpus", "Run the built-in corpus regression");
    std::string expect_path;
    corpus_cmd->add_option("--expect", expect_path,
                           "Manifest of expected verdicts (defaults to the built-in corpus)");
    corpus_cmd->add_option("--format", format, "Output format: text or json");
    corpus_cmd->add_option("--strategy-cap", opts.strategy_cap, "Active strategy-space cap");
    corpus_cmd->add_option("--budget", opts.derivation_budget, "Derivability search node budget");
    corpus_cmd->add_option("--max-mutations", opts.max_mutations,
                           "Mutated slots per attacker strategy");

    auto* demo = app.add_subcommand("ratchet-demo", "Exercise the group-session ratchet");
    std::string seed_hex;
    std::vector<std::uint64_t> targets;
    demo->add_option("--seed", seed_hex, "256 hex characters of ratchet seed (random if absent)");
    demo->add_option("--to", targets, "Index to advance to (repeatable, ascending)");

    CLI11_PARSE(app, argc, argv);

    if (!attacker.empty())
        opts.attacker_override = attacker == "active" ? dyw::dsl::AttackerMode::Active
                                                      : dyw::dsl::AttackerMode::Passive;

    if (analyze->parsed()) return run_analyze(model_path, format, opts);
    if (corpus_cmd->parsed()) return run_corpus(expect_path, format, opts);
    return run_ratchet_demo(seed_hex, targets);
}
