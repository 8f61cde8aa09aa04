// SPDX-License-Identifier: Apache-2.0

#include "llmsim/graph.hpp"

#include <algorithm>
#include <sstream>

#include "llmsim/error.hpp"
#include "number_format.hpp"

namespace llmsim {

std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::kMatmul:
      return "matmul";
    case OpKind::kAttentionScores:
      return "attention_scores";
    case OpKind::kAttentionApply:
      return "attention_apply";
    case OpKind::kSoftmax:
      return "softmax";
    case OpKind::kNorm:
      return "norm";
    case OpKind::kActivation:
      return "activation";
    case OpKind::kElementwiseAdd:
      return "elementwise_add";
    case OpKind::kEmbedLookup:
      return "embed_lookup";
    case OpKind::kHostTransfer:
      return "host_transfer";
  }
  return "?";
}

std::optional<OpKind> parse_op_kind(std::string_view text) {
  for (OpKind k : kAllOpKinds) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

bool is_matmul_like(OpKind kind) {
  return kind == OpKind::kMatmul || kind == OpKind::kAttentionScores ||
         kind == OpKind::kAttentionApply;
}

std::optional<AuxKind> aux_kind_for(OpKind kind) {
  switch (kind) {
    case OpKind::kSoftmax:
      return AuxKind::kSoftmax;
    case OpKind::kNorm:
      return AuxKind::kNorm;
    case OpKind::kActivation:
    case OpKind::kElementwiseAdd:
      return AuxKind::kActivation;
    case OpKind::kEmbedLookup:
      return AuxKind::kEmbedding;
    default:
      return std::nullopt;
  }
}

double matmul_flops(const std::array<std::int64_t, 4>& dims) {
  return 2.0 * static_cast<double>(dims[0]) * static_cast<double>(dims[1]) *
         static_cast<double>(dims[2]) * static_cast<double>(dims[3]);
}

std::string_view to_string(Phase phase) {
  return phase == Phase::kPrefill ? "prefill" : "decode";
}

namespace {

class GraphBuilder {
 public:
  GraphBuilder(const ModelConfig& m, const DataFormatPolicy& fmt, Phase phase,
               std::int64_t batch, std::int64_t context, std::int64_t new_tokens)
      : m_(m), fmt_(fmt), batch_(batch), context_(context), tokens_(new_tokens) {
    graph_.phase = phase;
    graph_.batch = batch;
    graph_.context_len = context;
    graph_.new_tokens = new_tokens;
    graph_.n_layers = m.n_layers;
    graph_.d_model = m.d_model;
  }

  ExecutionGraph build() {
    const double rows = static_cast<double>(batch_ * tokens_);
    const double d = static_cast<double>(m_.d_model);

    OpNode embed = aux(OpKind::kEmbedLookup, -1, "embed", rows * d);
    embed.weight_bytes = rows * d * weight_size();
    embed.act_bytes = rows * d * act_size();
    push(std::move(embed));

    for (std::int64_t l = 0; l < m_.n_layers; ++l) add_block(static_cast<int>(l));

    const int head = static_cast<int>(m_.n_layers);
    const double b = static_cast<double>(batch_);
    OpNode final_norm = aux(OpKind::kNorm, head, "final_norm", b * d);
    final_norm.weight_bytes = d * act_size();
    push(std::move(final_norm));
    // Only the last position feeds the LM head.
    push(matmul(head, "lm_head", batch_, 1, m_.d_model, m_.vocab,
                static_cast<double>(m_.vocab) * d * weight_size()));
    push(aux(OpKind::kSoftmax, head, "sample_softmax",
             b * static_cast<double>(m_.vocab)));
    return std::move(graph_);
  }

 private:
  double weight_size() const { return fmt_.weight_bits / 8.0; }
  double act_size() const { return fmt_.activation_bits / 8.0; }

  void push(OpNode n) { graph_.nodes.push_back(std::move(n)); }

  OpNode aux(OpKind kind, int layer, std::string label, double elements) const {
    OpNode n;
    n.kind = kind;
    n.layer = layer;
    n.label = std::move(label);
    n.act_elements = elements;
    n.act_bytes = (kind == OpKind::kElementwiseAdd ? 3.0 : 2.0) * elements * act_size();
    return n;
  }

  OpNode matmul(int layer, std::string label, std::int64_t b, std::int64_t m,
                std::int64_t k, std::int64_t n, double weights) const {
    OpNode node;
    node.kind = OpKind::kMatmul;
    node.layer = layer;
    node.label = std::move(label);
    node.dims = {b, m, k, n};
    node.flops = matmul_flops(node.dims);
    node.weight_bytes = weights;
    node.act_bytes = static_cast<double>(b) * static_cast<double>(m) *
                     static_cast<double>(k + n) * act_size();
    return node;
  }

  void add_block(int layer) {
    const std::int64_t heads = m_.n_heads;
    const std::int64_t hd = m_.head_dim;
    const std::int64_t dm = m_.d_model;
    const double d = static_cast<double>(dm);
    const double rows = static_cast<double>(batch_ * tokens_);
    const double ws = weight_size();
    const double kv_layer =
        static_cast<double>(kv_bytes_per_token(m_, fmt_)) / static_cast<double>(m_.n_layers);
    // Causal positions visible to the new tokens: sum over p in
    // [context, context+tokens) of (p + 1).
    const double visible = static_cast<double>(tokens_ * context_) +
                           static_cast<double>(tokens_ * (tokens_ + 1) / 2);
    const double bh = static_cast<double>(batch_ * heads);
    const double attn_flops = 2.0 * bh * static_cast<double>(hd) * visible;
    const double cached = static_cast<double>(batch_ * (context_ + tokens_));

    OpNode attn_norm = aux(OpKind::kNorm, layer, "attn_norm", rows * d);
    attn_norm.weight_bytes = d * act_size();
    push(std::move(attn_norm));

    const std::int64_t qkv_width = (heads + 2 * m_.n_kv_heads) * hd;
    OpNode qkv = matmul(layer, "qkv_proj", batch_, tokens_, dm, qkv_width,
                        d * static_cast<double>(qkv_width) * ws);
    qkv.kv_write_bytes = rows * kv_layer;
    push(std::move(qkv));

    OpNode scores;
    scores.kind = OpKind::kAttentionScores;
    scores.layer = layer;
    scores.label = "attn_scores";
    scores.dims = {batch_ * heads, tokens_, hd, context_ + tokens_};
    scores.flops = attn_flops;
    scores.kv_read_bytes = cached * kv_layer / 2.0;
    scores.act_bytes = (bh * static_cast<double>(tokens_ * hd) + bh * visible) * act_size();
    push(std::move(scores));

    OpNode softmax = aux(OpKind::kSoftmax, layer, "attn_softmax", bh * visible);
    push(std::move(softmax));

    OpNode apply;
    apply.kind = OpKind::kAttentionApply;
    apply.layer = layer;
    apply.label = "attn_apply";
    apply.dims = {batch_ * heads, tokens_, context_ + tokens_, hd};
    apply.flops = attn_flops;
    apply.kv_read_bytes = cached * kv_layer / 2.0;
    apply.act_bytes = (bh * visible + bh * static_cast<double>(tokens_ * hd)) * act_size();
    push(std::move(apply));

    const std::int64_t q_width = heads * hd;
    push(matmul(layer, "o_proj", batch_, tokens_, q_width, dm,
                static_cast<double>(q_width) * d * ws));
    push(aux(OpKind::kElementwiseAdd, layer, "attn_residual", rows * d));

    OpNode ffn_norm = aux(OpKind::kNorm, layer, "ffn_norm", rows * d);
    ffn_norm.weight_bytes = d * act_size();
    push(std::move(ffn_norm));

    // MoE: each token runs top_k experts; a pass streams the weights of
    // every expert some token in the pass was routed to.
    const std::int64_t top_k = m_.top_k();
    const double touched = static_cast<double>(
        std::min<std::int64_t>(m_.n_experts(), batch_ * tokens_ * top_k));
    const double expert_matrix = d * static_cast<double>(m_.d_ffn) * ws;
    const std::int64_t in_mats = m_.ffn_kind == FfnKind::kGated ? 2 : 1;
    const std::int64_t active_ffn = m_.d_ffn * top_k;
    push(matmul(layer, in_mats == 2 ? "ffn_gate_up" : "ffn_up", batch_, tokens_, dm,
                in_mats * active_ffn,
                touched * static_cast<double>(in_mats) * expert_matrix));
    push(aux(OpKind::kActivation, layer, "ffn_act",
             rows * static_cast<double>(active_ffn)));
    push(matmul(layer, "ffn_down", batch_, tokens_, active_ffn, dm,
                touched * expert_matrix));
    push(aux(OpKind::kElementwiseAdd, layer, "ffn_residual", rows * d));
  }

  const ModelConfig& m_;
  const DataFormatPolicy& fmt_;
  std::int64_t batch_;
  std::int64_t context_;
  std::int64_t tokens_;
  ExecutionGraph graph_;
};

}  // namespace

ExecutionGraph build_prefill_graph(const ModelConfig& m, const DataFormatPolicy& fmt,
                                   std::int64_t batch, std::int64_t seq_len) {
  validate(m);
  validate(fmt);
  if (batch < 1) throw ValidationError("prefill: batch must be >= 1");
  if (seq_len < 1) throw ValidationError("prefill: seq_len must be >= 1");
  return GraphBuilder(m, fmt, Phase::kPrefill, batch, 0, seq_len).build();
}

ExecutionGraph build_decode_graph(const ModelConfig& m, const DataFormatPolicy& fmt,
                                  std::int64_t batch, std::int64_t context_len) {
  validate(m);
  validate(fmt);
  if (batch < 1) throw ValidationError("decode: batch must be >= 1");
  if (context_len < 0) throw ValidationError("decode: context_len must be >= 0");
  return GraphBuilder(m, fmt, Phase::kDecodeStep, batch, context_len, 1).build();
}

GraphTotals& GraphTotals::operator+=(const GraphTotals& o) {
  flops += o.flops;
  weight_bytes += o.weight_bytes;
  kv_read += o.kv_read;
  kv_write += o.kv_write;
  act_elements += o.act_elements;
  return *this;
}

namespace {

GraphTotals accumulate(const ExecutionGraph& g, bool blocks_only) {
  GraphTotals t;
  for (const auto& n : g.nodes) {
    if (blocks_only && (n.layer < 0 || n.layer >= g.n_layers)) continue;
    t.flops += n.flops;
    t.weight_bytes += n.weight_bytes;
    t.kv_read += n.kv_read_bytes;
    t.kv_write += n.kv_write_bytes;
    t.act_elements += n.act_elements;
  }
  return t;
}

}  // namespace

GraphTotals graph_totals(const ExecutionGraph& g) { return accumulate(g, false); }

GraphTotals block_totals(const ExecutionGraph& g) { return accumulate(g, true); }

std::string dump_trace(const ExecutionGraph& g) {
  using detail::format_number;
  std::ostringstream out;
  out << "phase,layer,kind,label,batch,m,k,n,flops,weight_bytes,kv_read_bytes,"
         "kv_write_bytes,act_elements\n";
  for (const auto& n : g.nodes) {
    out << to_string(g.phase) << ',' << n.layer << ',' << to_string(n.kind) << ','
        << n.label << ',' << n.dims[0] << ',' << n.dims[1] << ',' << n.dims[2] << ','
        << n.dims[3] << ',' << format_number(n.flops) << ','
        << format_number(n.weight_bytes) << ',' << format_number(n.kv_read_bytes)
        << ',' << format_number(n.kv_write_bytes) << ','
        << format_number(n.act_elements) << '\n';
  }
  return out.str();
}

}  // namespace llmsim
