// SPDX-License-Identifier: Apache-2.0

#include "llmsim/models.hpp"

#include "codec.hpp"
#include "llmsim/error.hpp"

namespace llmsim {

using detail::Json;

namespace {

void require_that(bool ok, const ModelConfig& m, const std::string& what) {
  if (!ok) throw ValidationError("model '" + m.name + "': " + what);
}

bool supported_bits(int bits) {
  return bits == 4 || bits == 8 || bits == 16 || bits == 32;
}

}  // namespace

void validate(const ModelConfig& m) {
  require_that(!m.name.empty(), m, "name must not be empty");
  require_that(m.n_layers >= 0, m, "n_layers must be >= 0");
  require_that(m.d_model >= 1, m, "d_model must be >= 1");
  require_that(m.n_heads >= 1, m, "n_heads must be >= 1");
  require_that(m.n_kv_heads >= 1, m, "n_kv_heads must be >= 1");
  require_that(m.head_dim >= 1, m, "head_dim must be >= 1");
  require_that(m.d_ffn >= 1, m, "d_ffn must be >= 1");
  require_that(m.vocab >= 0, m, "vocab must be >= 0");
  require_that(m.n_heads % m.n_kv_heads == 0, m,
               "n_heads must be a multiple of n_kv_heads");
  require_that(m.head_dim_override || m.n_heads * m.head_dim == m.d_model, m,
               "n_heads * head_dim must equal d_model (set head_dim_override)");
  if (m.moe) {
    require_that(m.moe->n_experts >= 1, m, "moe.n_experts must be >= 1");
    require_that(m.moe->top_k >= 1, m, "moe.top_k must be >= 1");
    require_that(m.moe->top_k <= m.moe->n_experts, m,
                 "moe.top_k must not exceed moe.n_experts");
  }
}

void validate(const DataFormatPolicy& fmt) {
  auto check = [](int bits, const char* field) {
    if (!supported_bits(bits)) {
      throw ValidationError(std::string("format: ") + field +
                            " must be one of 4, 8, 16, 32 (got " +
                            std::to_string(bits) + ")");
    }
  };
  check(fmt.weight_bits, "weight_bits");
  check(fmt.kv_bits, "kv_bits");
  check(fmt.activation_bits, "activation_bits");
}

ParamBreakdown param_breakdown(const ModelConfig& m) {
  validate(m);
  ParamBreakdown out;
  const std::int64_t q_width = m.n_heads * m.head_dim;
  const std::int64_t kv_width = m.n_kv_heads * m.head_dim;
  out.embedding = m.vocab * m.d_model;
  out.attention = m.n_layers * (m.d_model * q_width + 2 * m.d_model * kv_width +
                                q_width * m.d_model);
  out.ffn = m.n_layers * m.n_experts() * m.ffn_matrices() * m.d_model * m.d_ffn;
  out.norms = 2 * m.n_layers * m.d_model + m.d_model;
  out.lm_head = m.tied_embeddings ? 0 : m.vocab * m.d_model;
  return out;
}

std::int64_t param_count(const ModelConfig& m) { return param_breakdown(m).total(); }

double weight_bytes(const ModelConfig& m, const DataFormatPolicy& fmt) {
  validate(fmt);
  const ParamBreakdown p = param_breakdown(m);
  return static_cast<double>(p.matrices()) * fmt.weight_bits / 8.0 +
         static_cast<double>(p.norms) * fmt.activation_bits / 8.0;
}

std::int64_t kv_bytes_per_token(const ModelConfig& m, const DataFormatPolicy& fmt) {
  validate(m);
  validate(fmt);
  // 2 * kv_bits/8 per element; kv_bits >= 4 keeps this integral.
  return m.n_layers * m.n_kv_heads * m.head_dim * fmt.kv_bits / 4;
}

ModelConfig mha_variant(const ModelConfig& m) {
  ModelConfig out = m;
  out.n_kv_heads = m.n_heads;
  out.name = m.name + "-MHA";
  return out;
}

std::vector<ModelConfig> builtin_models() {
  auto dense = [](std::string name, std::int64_t layers, std::int64_t d_model,
                  std::int64_t heads, std::int64_t kv_heads, std::int64_t d_ffn) {
    ModelConfig m;
    m.name = std::move(name);
    m.n_layers = layers;
    m.d_model = d_model;
    m.n_heads = heads;
    m.n_kv_heads = kv_heads;
    m.head_dim = d_model / heads;
    m.d_ffn = d_ffn;
    m.vocab = 32000;
    m.ffn_kind = FfnKind::kGated;
    return m;
  };
  ModelConfig llama70 = dense("Llama2-70B", 80, 8192, 64, 8, 28672);
  ModelConfig mixtral = dense("Mixtral-8x22B", 56, 6144, 48, 8, 16384);
  mixtral.moe = MoeConfig{8, 2};
  return {
      llama70,
      mha_variant(llama70),
      mixtral,
      mha_variant(mixtral),
      dense("Llama2-7B", 32, 4096, 32, 32, 11008),
      dense("Mistral-7B", 32, 4096, 32, 8, 14336),
  };
}

const ModelConfig& find_model(const std::vector<ModelConfig>& models,
                              std::string_view name) {
  for (const auto& m : models) {
    if (m.name == name) return m;
  }
  throw LookupError("unknown model '" + std::string(name) + "'");
}

Json detail::model_to_json(const ModelConfig& m) {
  Json j = Json::object();
  j["name"] = m.name;
  j["n_layers"] = m.n_layers;
  j["d_model"] = m.d_model;
  j["n_heads"] = m.n_heads;
  j["n_kv_heads"] = m.n_kv_heads;
  j["head_dim"] = m.head_dim;
  j["d_ffn"] = m.d_ffn;
  j["vocab"] = m.vocab;
  j["ffn_kind"] = m.ffn_kind == FfnKind::kGated ? "gated" : "plain";
  if (m.moe) j["moe"] = {{"n_experts", m.moe->n_experts}, {"top_k", m.moe->top_k}};
  j["tied_embeddings"] = m.tied_embeddings;
  if (m.head_dim_override) j["head_dim_override"] = true;
  return j;
}

ModelConfig detail::model_from_json(const Json& obj, const std::string& path) {
  check_keys(obj,
             {"name", "n_layers", "d_model", "n_heads", "n_kv_heads", "head_dim",
              "d_ffn", "vocab", "ffn_kind", "moe", "tied_embeddings",
              "head_dim_override"},
             path);
  ModelConfig m;
  m.name = get_string(obj, "name", path);
  const std::string base = "models." + m.name;
  m.n_layers = get_int(obj, "n_layers", base);
  m.d_model = get_int(obj, "d_model", base);
  m.n_heads = get_int(obj, "n_heads", base);
  m.n_kv_heads = get_int(obj, "n_kv_heads", base);
  m.head_dim = get_int(obj, "head_dim", base);
  m.d_ffn = get_int(obj, "d_ffn", base);
  m.vocab = get_int(obj, "vocab", base);
  const std::string kind = opt_string(obj, "ffn_kind", base).value_or("gated");
  if (kind == "gated") {
    m.ffn_kind = FfnKind::kGated;
  } else if (kind == "plain") {
    m.ffn_kind = FfnKind::kPlain;
  } else {
    throw ConfigError("field '" + base + ".ffn_kind': expected 'gated' or 'plain'");
  }
  if (obj.contains("moe")) {
    const Json& moe = require_object(obj, "moe", base);
    check_keys(moe, {"n_experts", "top_k"}, base + ".moe");
    m.moe = MoeConfig{get_int(moe, "n_experts", base + ".moe"),
                      get_int(moe, "top_k", base + ".moe")};
  }
  m.tied_embeddings = opt_bool(obj, "tied_embeddings", base).value_or(false);
  m.head_dim_override = opt_bool(obj, "head_dim_override", base).value_or(false);
  validate(m);
  return m;
}

Json detail::format_to_json(const DataFormatPolicy& fmt) {
  Json j = Json::object();
  j["weight_bits"] = fmt.weight_bits;
  j["kv_bits"] = fmt.kv_bits;
  j["activation_bits"] = fmt.activation_bits;
  return j;
}

DataFormatPolicy detail::format_from_json(const Json& obj, const std::string& path) {
  check_keys(obj, {"weight_bits", "kv_bits", "activation_bits"}, path);
  DataFormatPolicy fmt;
  fmt.weight_bits = static_cast<int>(opt_int(obj, "weight_bits", path).value_or(16));
  fmt.kv_bits = static_cast<int>(opt_int(obj, "kv_bits", path).value_or(16));
  fmt.activation_bits =
      static_cast<int>(opt_int(obj, "activation_bits", path).value_or(16));
  validate(fmt);
  return fmt;
}

std::vector<ModelConfig> load_models(std::string_view document) {
  Json doc = detail::parse_strict(document, "model document");
  detail::check_keys(doc, {"models"}, "");
  const Json& list = detail::require_array(doc, "models", "");
  std::vector<ModelConfig> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    ModelConfig m = detail::model_from_json(list[i], "models[" + std::to_string(i) + "]");
    for (const auto& existing : out) {
      if (existing.name == m.name) {
        throw ValidationError("model '" + m.name + "': duplicate name");
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::string serialize_models(const std::vector<ModelConfig>& models) {
  Json list = Json::array();
  for (const auto& m : models) list.push_back(detail::model_to_json(m));
  Json doc = Json::object();
  doc["models"] = std::move(list);
  return doc.dump(2) + "\n";
}

}  // namespace llmsim
