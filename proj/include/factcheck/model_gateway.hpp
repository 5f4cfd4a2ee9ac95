#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/jsonl.hpp"
#include "factcheck/lexical_index.hpp"

namespace factcheck {

enum class Role { ner, qg, cg, dense, nli };

inline constexpr std::array<Role, 5> all_roles{Role::ner, Role::qg, Role::cg, Role::dense,
                                               Role::nli};

[[nodiscard]] std::string_view to_string(Role role);
[[nodiscard]] Role parse_role(std::string_view text);

struct Entity {
    std::string text;
    std::string type;
    std::size_t start = 0;  // code-point offsets into the source text
    std::size_t end = 0;

    friend bool operator==(const Entity &, const Entity &) = default;

    /// Entities are identified by surface text and type, not by position.
    [[nodiscard]] bool same_identity(const Entity &other) const
    {
        return text == other.text && type == other.type;
    }
};

/// Raw classifier scores ordered (SUPPORTS, REFUTES, NEI).
struct NliLogits {
    std::array<double, 3> values{};

    friend bool operator==(const NliLogits &, const NliLogits &) = default;
};

struct BackendConfig {
    enum class Kind { remote, stub };

    Role role = Role::ner;
    Kind kind = Kind::stub;
    std::string endpoint;                   // remote only, e.g. http://host:9000/nli
    std::optional<std::uint64_t> stub_seed; // stub only
    std::chrono::milliseconds timeout{30000};
    std::size_t max_connections = 8;

    void validate() const;
};

struct GatewayConfig {
    std::string corpus_id;
    std::map<Role, BackendConfig> backends;

    /// {"corpus_id": "...", "backends": {"nli": {"kind": "remote", "endpoint": ...}, ...}}
    [[nodiscard]] static GatewayConfig from_json(const json &doc);
    [[nodiscard]] static GatewayConfig load(const std::filesystem::path &path);
    [[nodiscard]] static GatewayConfig all_stubs(std::uint64_t seed);
};

/// Provider for one neural role. Only the method matching the configured role
/// is ever called. Implementations must be safe for concurrent calls.
class Backend {
   public:
    virtual ~Backend() = default;

    virtual std::vector<Entity> ner(std::string_view text) const;
    virtual std::string question(const Entity &answer, std::string_view context) const;
    virtual std::string claim(std::string_view answer, std::string_view question) const;
    virtual std::vector<RankedEvidence> dense(std::string_view claim, std::size_t k) const;
    virtual NliLogits nli(std::string_view claim, std::string_view evidence) const;
    /// Cheap liveness probe; never throws.
    [[nodiscard]] virtual bool reachable() const noexcept = 0;
};

/// Deterministic rule-based stand-ins for all roles:
///  - ner: maximal runs of capitalized words -> PER, digit runs -> NUM
///  - qg: "STUB-Q[<answer>]: which? <context>"
///  - cg: "STUB-C: <question minus wh-word/auxiliary and '?'> = <answer>."
///  - dense: BM-25 (k1 = b = 0.9) over the attached index, stage dense
///  - nli: overlap = |shared distinct tokens| - 2, logits (overlap, -overlap, 0)
class StubBackend final : public Backend {
   public:
    explicit StubBackend(std::uint64_t seed, std::shared_ptr<const InvertedIndex> index = nullptr);

    std::vector<Entity> ner(std::string_view text) const override;
    std::string question(const Entity &answer, std::string_view context) const override;
    std::string claim(std::string_view answer, std::string_view question) const override;
    std::vector<RankedEvidence> dense(std::string_view claim, std::size_t k) const override;
    NliLogits nli(std::string_view claim, std::string_view evidence) const override;
    [[nodiscard]] bool reachable() const noexcept override { return true; }

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

   private:
    std::uint64_t seed_;
    std::shared_ptr<const InvertedIndex> index_;
};

/// JSON-over-HTTP client for an external model server (docs/backend_protocol.md).
/// One retry on transport failure; concurrent requests bounded by max_connections.
class RemoteBackend final : public Backend {
   public:
    RemoteBackend(const BackendConfig &config, std::string corpus_id);
    ~RemoteBackend() override;

    std::vector<Entity> ner(std::string_view text) const override;
    std::string question(const Entity &answer, std::string_view context) const override;
    std::string claim(std::string_view answer, std::string_view question) const override;
    std::vector<RankedEvidence> dense(std::string_view claim, std::size_t k) const override;
    NliLogits nli(std::string_view claim, std::string_view evidence) const override;
    [[nodiscard]] bool reachable() const noexcept override;

   private:
    struct Impl;
    std::unique_ptr<Impl> impl_;

    json post(const json &body) const;
};

/// Validating front door to the five roles.
class ModelGateway {
   public:
    ModelGateway() = default;

    /// Stub dense backends search `stub_index`; without one they report an
    /// unknown corpus.
    [[nodiscard]] static ModelGateway from_config(
        const GatewayConfig &config, std::shared_ptr<const InvertedIndex> stub_index = nullptr);

    void set_backend(Role role, std::shared_ptr<const Backend> backend);
    [[nodiscard]] bool configured(Role role) const;

    /// Entities with slice-valid spans, deduplicated by (text, type).
    [[nodiscard]] std::vector<Entity> ner(std::string_view text) const;
    [[nodiscard]] std::string generate_question(const Entity &answer,
                                                std::string_view context) const;
    [[nodiscard]] std::string generate_claim(std::string_view answer,
                                             std::string_view question) const;
    [[nodiscard]] std::vector<RankedEvidence> dense_search(std::string_view claim,
                                                           std::size_t k) const;
    [[nodiscard]] NliLogits nli(std::string_view claim, std::string_view evidence) const;

    [[nodiscard]] std::map<Role, bool> reachability() const;

   private:
    std::array<std::shared_ptr<const Backend>, all_roles.size()> backends_{};

    const Backend &backend(Role role) const;
};

}  // namespace factcheck
