// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures and independent oracles for the test suites. Nothing here
// calls into the graph builder or the cost model; the oracles recompute
// each quantity from the model shape directly.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "llmsim/models.hpp"
#include "llmsim/profiles.hpp"

namespace llmsim::testing {

inline ModelConfig toy_model() {
  ModelConfig m;
  m.name = "toy";
  m.n_layers = 2;
  m.d_model = 64;
  m.n_heads = 4;
  m.n_kv_heads = 2;
  m.head_dim = 16;
  m.d_ffn = 128;
  m.vocab = 100;
  return m;
}

// tops=1, mem_bw=10, all energies zero; links at 5 GB/s.
inline HardwareProfile toy_profile() {
  HardwareProfile p;
  p.name = "toy";
  p.compute_tops = 1.0;
  p.compute_pj_per_op = 0.0;
  p.main_memory = {10.0, 0.0};
  p.h2d = {5.0, 0.0};
  p.d2h = {5.0, 0.0};
  return with_default_aux(p);
}

inline bool close_rel(double a, double b, double rel) {
  if (a == b) return true;
  return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

class Rng {
 public:
  explicit Rng(std::uint32_t seed) : gen_(seed) {}

  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(gen_);
  }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  // Log-uniform, for rates spanning orders of magnitude.
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  bool coin() { return uniform_int(0, 1) == 1; }
  int bits() {
    static constexpr int kBits[] = {4, 8, 16, 32};
    return kBits[uniform_int(0, 3)];
  }

 private:
  std::mt19937 gen_;
};

inline ModelConfig random_model(Rng& rng) {
  ModelConfig m;
  m.name = "rand";
  m.n_layers = rng.uniform_int(1, 4);
  m.n_kv_heads = rng.uniform_int(1, 3);
  m.n_heads = m.n_kv_heads * rng.uniform_int(1, 3);
  m.head_dim = rng.uniform_int(1, 8);
  m.d_model = m.n_heads * m.head_dim;
  m.d_ffn = rng.uniform_int(1, 24);
  m.vocab = rng.uniform_int(0, 50);
  m.ffn_kind = rng.coin() ? FfnKind::kGated : FfnKind::kPlain;
  m.tied_embeddings = rng.coin();
  if (rng.coin()) {
    MoeConfig moe;
    moe.n_experts = rng.uniform_int(1, 6);
    moe.top_k = rng.uniform_int(1, moe.n_experts);
    m.moe = moe;
  }
  return m;
}

inline HardwareProfile random_profile(Rng& rng, std::string name = "rand") {
  HardwareProfile p;
  p.name = std::move(name);
  p.compute_tops = rng.log_uniform(0.1, 1e4);
  p.compute_pj_per_op = rng.uniform(0.0, 2.0);
  p.main_memory = {rng.log_uniform(1.0, 1e5), rng.uniform(0.0, 30.0)};
  p.h2d = {rng.log_uniform(1.0, 1e3), rng.uniform(0.0, 2000.0)};
  p.d2h = {rng.log_uniform(1.0, 1e3), rng.uniform(0.0, 2000.0)};
  if (rng.coin()) {
    p.aux.push_back({AuxKind::kSoftmax, {rng.log_uniform(1e6, 1e14), rng.uniform(0.0, 5.0)}});
  }
  return with_default_aux(p);
}

// Element count by enumerating every matrix and vector of the network.
inline std::int64_t brute_param_count(const ModelConfig& m) {
  struct Shape {
    std::int64_t rows, cols;
  };
  std::vector<Shape> shapes;
  shapes.push_back({m.vocab, m.d_model});
  for (std::int64_t l = 0; l < m.n_layers; ++l) {
    shapes.push_back({1, m.d_model});
    shapes.push_back({m.d_model, m.n_heads * m.head_dim});
    shapes.push_back({m.d_model, m.n_kv_heads * m.head_dim});
    shapes.push_back({m.d_model, m.n_kv_heads * m.head_dim});
    shapes.push_back({m.n_heads * m.head_dim, m.d_model});
    shapes.push_back({1, m.d_model});
    const std::int64_t experts = m.moe ? m.moe->n_experts : 1;
    for (std::int64_t e = 0; e < experts; ++e) {
      if (m.ffn_kind == FfnKind::kGated) shapes.push_back({m.d_model, m.d_ffn});
      shapes.push_back({m.d_model, m.d_ffn});
      shapes.push_back({m.d_ffn, m.d_model});
    }
  }
  shapes.push_back({1, m.d_model});
  if (!m.tied_embeddings) shapes.push_back({m.d_model, m.vocab});
  std::int64_t total = 0;
  for (const auto& s : shapes) {
    for (std::int64_t r = 0; r < s.rows; ++r) total += s.cols;
  }
  return total;
}

// Multiply-adds of C[b] += A[b] (m x k) * B (k x n), counted one by one.
inline std::int64_t counted_matmul_flops(std::int64_t b, std::int64_t m, std::int64_t k,
                                         std::int64_t n) {
  std::int64_t ops = 0;
  for (std::int64_t i = 0; i < b; ++i)
    for (std::int64_t r = 0; r < m; ++r)
      for (std::int64_t c = 0; c < n; ++c)
        for (std::int64_t j = 0; j < k; ++j) ops += 2;
  return ops;
}

// Scores for causal attention: new token at absolute position p sees p+1
// keys; each key costs one head_dim dot product per head.
inline std::int64_t causal_scores_flops(std::int64_t batch, std::int64_t heads,
                                        std::int64_t head_dim, std::int64_t context,
                                        std::int64_t new_tokens) {
  std::int64_t ops = 0;
  for (std::int64_t b = 0; b < batch; ++b)
    for (std::int64_t h = 0; h < heads; ++h)
      for (std::int64_t p = context; p < context + new_tokens; ++p)
        for (std::int64_t key = 0; key <= p; ++key) ops += 2 * head_dim;
  return ops;
}

// Per-pass totals recomputed from the model shape: what one forward pass
// over `tokens` new tokens after `context` cached tokens must cost.
struct PassOracle {
  double flops = 0.0;
  double weight_bytes = 0.0;
  double kv_read = 0.0;
  double kv_write = 0.0;
  double softmax_elems = 0.0;
  double norm_elems = 0.0;
  double activation_elems = 0.0;  // FFN nonlinearity and residual adds
  double embed_elems = 0.0;
  double h2d_bytes = 0.0;
  double d2h_bytes = 0.0;
};

inline PassOracle pass_oracle(const ModelConfig& m, const DataFormatPolicy& fmt,
                              std::int64_t batch, std::int64_t context,
                              std::int64_t tokens) {
  PassOracle o;
  const double wb = fmt.weight_bits / 8.0;
  const double ab = fmt.activation_bits / 8.0;
  const double kvb = fmt.kv_bits / 8.0;
  const double rows = static_cast<double>(batch * tokens);
  const double d = static_cast<double>(m.d_model);
  const std::int64_t experts = m.moe ? m.moe->n_experts : 1;
  const std::int64_t top_k = m.moe ? m.moe->top_k : 1;
  const std::int64_t touched = std::min(experts, batch * tokens * top_k);
  const std::int64_t in_mats = m.ffn_kind == FfnKind::kGated ? 2 : 1;

  o.embed_elems = rows * d;
  o.weight_bytes += rows * d * wb;  // gathered embedding rows
  for (std::int64_t l = 0; l < m.n_layers; ++l) {
    o.norm_elems += 2 * rows * d;
    o.weight_bytes += 2 * d * ab;
    const std::int64_t q = m.n_heads * m.head_dim;
    const std::int64_t kv = m.n_kv_heads * m.head_dim;
    o.flops += static_cast<double>(counted_matmul_flops(batch, tokens, m.d_model, q + 2 * kv));
    o.weight_bytes += d * static_cast<double>(q + 2 * kv) * wb;
    const double kv_token_layer = 2.0 * static_cast<double>(kv) * kvb;
    o.kv_write += rows * kv_token_layer;
    o.kv_read += static_cast<double>(batch * (context + tokens)) * kv_token_layer;
    const double scores = static_cast<double>(
        causal_scores_flops(batch, m.n_heads, m.head_dim, context, tokens));
    o.flops += 2 * scores;  // QK^T and PV
    o.softmax_elems += scores / (2.0 * static_cast<double>(m.head_dim));
    o.flops += static_cast<double>(counted_matmul_flops(batch, tokens, q, m.d_model));
    o.weight_bytes += static_cast<double>(q) * d * wb;
    o.activation_elems += 2 * rows * d;
    o.flops += static_cast<double>(
        counted_matmul_flops(batch, tokens, m.d_model, in_mats * m.d_ffn * top_k));
    o.flops += static_cast<double>(counted_matmul_flops(batch, tokens, m.d_ffn * top_k, m.d_model));
    o.weight_bytes += static_cast<double>(touched * (in_mats + 1)) * d *
                      static_cast<double>(m.d_ffn) * wb;
    o.activation_elems += rows * static_cast<double>(m.d_ffn * top_k);
  }
  o.norm_elems += static_cast<double>(batch) * d;
  o.weight_bytes += d * ab;
  o.flops += static_cast<double>(counted_matmul_flops(batch, 1, m.d_model, m.vocab));
  o.weight_bytes += static_cast<double>(m.vocab) * d * wb;
  o.softmax_elems += static_cast<double>(batch * m.vocab);
  o.h2d_bytes = rows * d * ab;
  o.d2h_bytes = static_cast<double>(batch) * d * ab;
  return o;
}

// Serialized time of one pass on a single profile with default aux costs,
// boundary transfers included: the spreadsheet fold.
inline double pass_time(const PassOracle& o, const HardwareProfile& p) {
  const double aux_rate = p.compute_tops * 1e12 / 8.0;
  const double bytes = o.weight_bytes + o.kv_read + o.kv_write;
  return o.flops / (p.compute_tops * 1e12) + bytes / (p.main_memory.bw_gbps * 1e9) +
         (o.softmax_elems + o.norm_elems + o.activation_elems + o.embed_elems) / aux_rate +
         o.h2d_bytes / (p.h2d.bw_gbps * 1e9) + o.d2h_bytes / (p.d2h.bw_gbps * 1e9);
}

// Energy of the same pass in pJ.
inline double pass_energy_pj(const PassOracle& o, const HardwareProfile& p) {
  const double bytes = o.weight_bytes + o.kv_read + o.kv_write;
  const double aux = o.softmax_elems + o.norm_elems + o.activation_elems + o.embed_elems;
  return o.flops * p.compute_pj_per_op + bytes * 8.0 * p.main_memory.pj_per_bit +
         aux * p.compute_pj_per_op + o.h2d_bytes * 8.0 * p.h2d.pj_per_bit +
         o.d2h_bytes * 8.0 * p.d2h.pj_per_bit;
}

}  // namespace llmsim::testing
