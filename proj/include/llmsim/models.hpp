// SPDX-License-Identifier: Apache-2.0
//
// Transformer architecture descriptors and the byte-level footprint
// derived from them.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace llmsim {

enum class FfnKind { kGated, kPlain };

struct MoeConfig {
  std::int64_t n_experts = 1;
  std::int64_t top_k = 1;

  bool operator==(const MoeConfig&) const = default;
};

struct ModelConfig {
  std::string name;
  std::int64_t n_layers = 0;
  std::int64_t d_model = 0;
  std::int64_t n_heads = 0;
  std::int64_t n_kv_heads = 0;
  std::int64_t head_dim = 0;
  std::int64_t d_ffn = 0;
  std::int64_t vocab = 0;
  FfnKind ffn_kind = FfnKind::kGated;
  std::optional<MoeConfig> moe;
  bool tied_embeddings = false;
  // Permits n_heads * head_dim != d_model.
  bool head_dim_override = false;

  std::int64_t n_experts() const { return moe ? moe->n_experts : 1; }
  std::int64_t top_k() const { return moe ? moe->top_k : 1; }
  std::int64_t ffn_matrices() const { return ffn_kind == FfnKind::kGated ? 3 : 2; }
  bool is_mha() const { return n_kv_heads == n_heads; }

  bool operator==(const ModelConfig&) const = default;
};

// Bits per element. Each field must be one of 4, 8, 16, 32.
struct DataFormatPolicy {
  int weight_bits = 16;
  int kv_bits = 16;
  int activation_bits = 16;

  bool operator==(const DataFormatPolicy&) const = default;
};

// Throws ValidationError naming the first broken invariant.
void validate(const ModelConfig& m);
void validate(const DataFormatPolicy& fmt);

struct ParamBreakdown {
  std::int64_t embedding = 0;
  std::int64_t attention = 0;
  std::int64_t ffn = 0;
  std::int64_t norms = 0;  // per-layer norms plus the final norm
  std::int64_t lm_head = 0;

  std::int64_t total() const { return embedding + attention + ffn + norms + lm_head; }
  std::int64_t matrices() const { return total() - norms; }
};

ParamBreakdown param_breakdown(const ModelConfig& m);
std::int64_t param_count(const ModelConfig& m);

// Matrices at weight_bits, norm vectors at activation_bits.
double weight_bytes(const ModelConfig& m, const DataFormatPolicy& fmt);

// K and V for one token across all layers.
std::int64_t kv_bytes_per_token(const ModelConfig& m, const DataFormatPolicy& fmt);

// Same model with one KV head per query head.
ModelConfig mha_variant(const ModelConfig& m);

std::vector<ModelConfig> builtin_models();
const ModelConfig& find_model(const std::vector<ModelConfig>& models,
                              std::string_view name);

// {"models": [...]} documents, one entry per ModelConfig.
std::vector<ModelConfig> load_models(std::string_view document);
std::string serialize_models(const std::vector<ModelConfig>& models);

}  // namespace llmsim
