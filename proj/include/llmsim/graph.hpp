// SPDX-License-Identifier: Apache-2.0
//
// Execution graphs: one prefill pass or one decode step expanded into an
// ordered list of cost-annotated operations.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmsim/models.hpp"
#include "llmsim/profiles.hpp"

namespace llmsim {

enum class OpKind {
  kMatmul,
  kAttentionScores,
  kAttentionApply,
  kSoftmax,
  kNorm,
  kActivation,
  kElementwiseAdd,
  kEmbedLookup,
  kHostTransfer,
};

inline constexpr OpKind kAllOpKinds[] = {
    OpKind::kMatmul,     OpKind::kAttentionScores, OpKind::kAttentionApply,
    OpKind::kSoftmax,    OpKind::kNorm,            OpKind::kActivation,
    OpKind::kElementwiseAdd, OpKind::kEmbedLookup, OpKind::kHostTransfer};

std::string_view to_string(OpKind kind);
std::optional<OpKind> parse_op_kind(std::string_view text);

bool is_matmul_like(OpKind kind);
// Aux cost class charged for a weightless elementwise kind; nullopt for
// matmul-like kinds and host transfers.
std::optional<AuxKind> aux_kind_for(OpKind kind);

struct OpNode {
  OpKind kind = OpKind::kMatmul;
  // [batch, m, k, n] for matmul-like kinds. Attention nodes store the
  // bounding shape [batch*heads, new_tokens, head_dim, context+new_tokens].
  std::array<std::int64_t, 4> dims{};
  double flops = 0.0;
  double weight_bytes = 0.0;
  double kv_read_bytes = 0.0;
  double kv_write_bytes = 0.0;
  double act_elements = 0.0;
  // Intermediate tensor bytes; charged to main memory only when the cost
  // model is told to.
  double act_bytes = 0.0;
  // -1 before the first block, n_layers for the output head.
  int layer = 0;
  std::string label;
};

// 2*batch*m*k*n.
double matmul_flops(const std::array<std::int64_t, 4>& dims);

enum class Phase { kPrefill, kDecodeStep };

std::string_view to_string(Phase phase);

struct ExecutionGraph {
  Phase phase = Phase::kPrefill;
  std::int64_t batch = 0;
  std::int64_t context_len = 0;  // tokens already cached
  std::int64_t new_tokens = 0;   // tokens processed by this pass
  std::int64_t n_layers = 0;
  std::int64_t d_model = 0;
  std::vector<OpNode> nodes;
};

ExecutionGraph build_prefill_graph(const ModelConfig& m, const DataFormatPolicy& fmt,
                                   std::int64_t batch, std::int64_t seq_len);

ExecutionGraph build_decode_graph(const ModelConfig& m, const DataFormatPolicy& fmt,
                                  std::int64_t batch, std::int64_t context_len);

struct GraphTotals {
  double flops = 0.0;
  double weight_bytes = 0.0;
  double kv_read = 0.0;
  double kv_write = 0.0;
  double act_elements = 0.0;

  GraphTotals& operator+=(const GraphTotals& o);
};

GraphTotals graph_totals(const ExecutionGraph& g);
// Only the transformer-block nodes (0 <= layer < n_layers).
GraphTotals block_totals(const ExecutionGraph& g);

// CSV trace, one node per line:
// phase,layer,kind,label,batch,m,k,n,flops,weight_bytes,kv_read_bytes,
// kv_write_bytes,act_elements
std::string dump_trace(const ExecutionGraph& g);

}  // namespace llmsim
