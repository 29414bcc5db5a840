#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccm/checks.hpp"
#include "ccm/loops.hpp"
#include "ccm/model.hpp"
#include "ccm/spacetime.hpp"

namespace ccm {

enum class EntryKind { Model, AffectsSetEntry, EmbeddingEntry };

// A builtin example: a model, an affects set or an embedding (with the affects set it refers to),
// plus golden results. Every golden block carries a provenance tag.
struct CorpusEntry {
    std::string name;
    EntryKind kind = EntryKind::Model;
    std::string path;
    std::optional<CausalModel> model;
    std::optional<AffectsSet> set;
    std::optional<Embedding> embedding;
    std::string set_ref;        // embeddings: name of the affects-set entry they embed
    std::string expected_json;  // golden results, JSON object text
};

// Directory holding the corpus: $CCM_CORPUS_DIR when set, else the directory configured at build time.
std::string corpus_dir();
const std::vector<std::string>& builtin_names();
std::vector<std::string> builtin_models();  // names of model entries, registry order

CorpusEntry load_builtin(const std::string& name);
CorpusEntry load_entry(const std::string& dir, const std::string& name);
CorpusEntry parse_entry(const std::string& name, const std::string& json_text, const std::string& dir = "");
std::string entry_to_json(const CorpusEntry& e);

// Recomputes every golden result of one entry; returns human-readable failures.
std::vector<std::string> verify_entry(const CorpusEntry& e);
ModelReport verify_all();
ModelReport verify_all(const std::string& dir);

}  // namespace ccm
