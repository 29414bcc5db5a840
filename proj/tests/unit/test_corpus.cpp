#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "ccm/corpus.hpp"
#include "ccm/error.hpp"
#include "ccm/model_io.hpp"
#include "support.hpp"

using namespace ccm;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

fs::path copy_corpus(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("ccm_corpus_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::copy(CCM_TEST_CORPUS_DIR, dir);
    return dir;
}

void rewrite(const fs::path& file, const std::function<void(json&)>& edit) {
    json j = json::parse(read_file(file.string()));
    edit(j);
    std::ofstream(file) << j.dump(2);
}

}  // namespace

TEST_CASE("the registry lists the required entries and all load") {
    for (auto& name : {"bell_classical", "bell_quantum", "thermostat", "one_time_pad", "traitor", "nontransitive", "eg3",
                       "hoaffects1", "hoaffects2", "hoaffects3", "jamming", "eg2", "eg4", "finetuned_collider",
                       "acl4_model", "acl1_faithful", "funcloop", "q_bell_loop", "prbox_loop", "acl7_set", "acl9_set",
                       "acl11_set", "acl3_set", "acl4_embedding"}) {
        auto& names = builtin_names();
        CHECK_MESSAGE(std::find(names.begin(), names.end(), name) != names.end(), name);
    }
    for (auto& name : builtin_names()) {
        CAPTURE(name);
        CorpusEntry e = load_entry(CCM_TEST_CORPUS_DIR, name);
        CHECK(e.name == name);
        CHECK((e.model || e.set || e.embedding));
        CHECK_FALSE(json::parse(e.expected_json).empty());
    }
}

TEST_CASE("the builtin models carry the documented mechanisms") {
    auto acl4 = testing::corpus_model("acl4_model");
    CHECK(acl4.graph.has_edge("A", "B"));
    CHECK(acl4.graph.has_edge("C", "B"));
    CHECK(acl4.graph.has_edge("B", "C"));
    CHECK_FALSE(acl4.graph.is_acyclic());
    auto jam = testing::corpus_model("jamming");
    CHECK(jam.graph.is_acyclic());
    CHECK(jam.graph.latent().size() == 1);
}

TEST_CASE("unknown entries") {
    bool threw = false;
    try {
        load_builtin("no_such_entry");
    } catch (const Error& e) {
        threw = e.kind() == ErrorKind::UnknownEntry;
    }
    CHECK(threw);
}

TEST_CASE("every golden block carries a provenance tag") {
    for (auto& name : builtin_names()) {
        json expected = json::parse(load_entry(CCM_TEST_CORPUS_DIR, name).expected_json);
        for (auto& [key, block] : expected.items()) {
            CAPTURE(name + "." + key);
            REQUIRE(block.contains("provenance"));
            std::string p = block.at("provenance");
            CHECK((p.rfind("[PAPER", 0) == 0 || p.rfind("[TRIVIAL", 0) == 0 || p.rfind("[DERIVED", 0) == 0));
        }
    }
}

TEST_CASE("a fresh corpus verifies") {
    ModelReport r = verify_all(CCM_TEST_CORPUS_DIR);
    for (auto& v : r.violations) INFO(v.detail);
    CHECK(r.passed());
}

TEST_CASE("a tampered golden is reported with its entry name") {
    fs::path dir = copy_corpus("tamper");
    rewrite(dir / "jamming.json", [](json& j) {
        for (auto& e : j["expected"]["affects"]["entries"])
            if (e["from"] == json::array({"B"}) && e["to"] == json::array({"A", "C"})) e["holds"] = false;
    });
    rewrite(dir / "acl9_set.json", [](json& j) { j["expected"]["recursive"]["entries"][0]["type"] = 9; });
    ModelReport r = verify_all(dir.string());
    CHECK_FALSE(r.passed());
    bool jam = false, acl9 = false, other = false;
    for (auto& v : r.violations) {
        jam |= v.detail.rfind("jamming:", 0) == 0;
        acl9 |= v.detail.rfind("acl9_set:", 0) == 0;
        other |= v.detail.rfind("jamming:", 0) != 0 && v.detail.rfind("acl9_set:", 0) != 0;
    }
    CHECK(jam);
    CHECK(acl9);
    CHECK_FALSE(other);
    fs::remove_all(dir);
}

TEST_CASE("malformed goldens are failures, not silently ignored") {
    fs::path dir = copy_corpus("malformed");
    rewrite(dir / "eg3.json", [](json& j) { j["expected"]["mystery"] = {{"provenance", "[TRIVIAL]"}}; });
    rewrite(dir / "eg4.json", [](json& j) { j["expected"]["affects"].erase("provenance"); });
    ModelReport r = verify_all(dir.string());
    int hits = 0;
    for (auto& v : r.violations) hits += v.detail.rfind("eg3:", 0) == 0 || v.detail.rfind("eg4:", 0) == 0;
    CHECK(hits >= 2);
    fs::remove_all(dir);
}

TEST_CASE("registry entries round-trip through JSON") {
    for (auto& name : builtin_names()) {
        CAPTURE(name);
        CorpusEntry e = load_entry(CCM_TEST_CORPUS_DIR, name);
        std::string once = entry_to_json(e);
        CorpusEntry back = parse_entry(name, once, CCM_TEST_CORPUS_DIR);
        CHECK(entry_to_json(back) == once);
        CHECK(back.kind == e.kind);
        CHECK(json::parse(back.expected_json) == json::parse(e.expected_json));
        CHECK(verify_entry(back).empty());
    }
}
