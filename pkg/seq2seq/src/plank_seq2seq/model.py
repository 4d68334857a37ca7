"""Transformer encoder-decoder with a pointer-generator output head.

Input tokens embed as the sum of value/view/edge/coord/type lookups;
output-side tokens embed as value/plank/face sums with the value table
shared across both sides, and a dedicated learned start vector. At step t
the decoder state yields a vocabulary distribution, dot-product scores
against the hidden states of the earlier steps, and a gate mixing the two;
the final distribution is their weighted concatenation. At the first step
there are no earlier states and the vocabulary distribution is used as is.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F
from torch import nn

from plankforge.codec import VOCAB_SIZE, VOCAB_SOS

from .config import ModelConfig


class PointerGeneratorSeq2Seq(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        d = config.d_model
        self.value_embed = nn.Embedding(config.vocab_size, d)  # shared both sides
        self.view_embed = nn.Embedding(3, d)
        self.edge_embed = nn.Embedding(config.max_edges_per_view, d)
        self.coord_embed = nn.Embedding(4, d)
        self.type_embed = nn.Embedding(2, d)
        self.plank_embed = nn.Embedding(config.max_cuboids, d)
        self.face_embed = nn.Embedding(6, d)
        self.sos_vector = nn.Parameter(torch.zeros(d))

        self.encoder = nn.TransformerEncoder(
            nn.TransformerEncoderLayer(
                d_model=d,
                nhead=config.heads,
                dim_feedforward=config.ff_dim,
                dropout=config.dropout,
                batch_first=True,
            ),
            num_layers=config.encoder_layers,
        )
        self.decoder = nn.TransformerDecoder(
            nn.TransformerDecoderLayer(
                d_model=d,
                nhead=config.heads,
                dim_feedforward=config.ff_dim,
                dropout=config.dropout,
                batch_first=True,
            ),
            num_layers=config.decoder_layers,
        )
        self.vocab_proj = nn.Linear(d, config.vocab_size)
        self.pointer_proj = nn.Linear(d, d)
        self.gate_proj = nn.Linear(d, 1)

    def embed_input(self, batch: dict[str, torch.Tensor]) -> torch.Tensor:
        return (
            self.value_embed(batch["enc_bin"])
            + self.view_embed(batch["enc_view"])
            + self.edge_embed(batch["enc_edge"])
            + self.coord_embed(batch["enc_coord"])
            + self.type_embed(batch["enc_vis"])
        )

    def embed_output(self, batch: dict[str, torch.Tensor]) -> torch.Tensor:
        emb = (
            self.value_embed(batch["dec_bin"])
            + self.plank_embed(batch["dec_plank"])
            + self.face_embed(batch["dec_face"])
        )
        is_sos = batch["dec_is_sos"].bool().unsqueeze(-1)
        return torch.where(is_sos, self.sos_vector.expand_as(emb), emb)

    def hidden_states(self, batch: dict[str, torch.Tensor]) -> torch.Tensor:
        memory = self.encoder(self.embed_input(batch), src_key_padding_mask=batch["enc_pad"])
        steps = batch["dec_bin"].shape[1]
        causal = nn.Transformer.generate_square_subsequent_mask(
            steps, device=batch["dec_bin"].device
        )
        return self.decoder(
            self.embed_output(batch),
            memory,
            tgt_mask=causal,
            tgt_key_padding_mask=batch["dec_pad"],
            memory_key_padding_mask=batch["enc_pad"],
        )

    def head(self, hidden: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        """Per step: vocabulary logits, raw pointer scores against every
        decoder position, and the gate logit. Score masking happens in
        step_log_probs."""
        vocab_logits = self.vocab_proj(hidden)
        queries = self.pointer_proj(hidden)
        ptr_scores = torch.einsum("btd,bsd->bts", queries, hidden)
        gate_logits = self.gate_proj(hidden).squeeze(-1)
        return vocab_logits, ptr_scores, gate_logits

    def step_log_probs(
        self, batch: dict[str, torch.Tensor]
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """Log probabilities of the concatenated distribution.

        Returns (log_probs, attach_mask): log_probs has shape
        [B, T, vocab + T] where entry [b, k, vocab + j] scores a pointer to
        output position j + 1; attach_mask marks the valid pointer slots.
        """
        hidden = self.hidden_states(batch)
        vocab_logits, ptr_scores, gate_logits = self.head(hidden)
        b, t, _ = vocab_logits.shape

        vocab_logits = vocab_logits.clone()
        vocab_logits[..., VOCAB_SOS] = float("-inf")
        log_p_vocab = F.log_softmax(vocab_logits, dim=-1)

        # Step k may point at decoder positions 1..k (output positions 1..k).
        pos = torch.arange(t, device=hidden.device)
        attach_mask = (pos.view(1, t, 1) >= pos.view(1, 1, t)) & (pos.view(1, 1, t) >= 1)
        attach_mask = attach_mask & ~batch["dec_pad"].unsqueeze(1)
        scores = ptr_scores.masked_fill(~attach_mask, float("-inf"))
        has_attach = attach_mask.any(dim=-1)
        log_p_attach = torch.full_like(scores, float("-inf"))
        if t > 1:
            safe = scores[has_attach.expand(b, t)]
            log_p_attach[has_attach.expand(b, t)] = F.log_softmax(safe, dim=-1)

        log_gate = F.logsigmoid(gate_logits)  # log w_t
        log_keep = F.logsigmoid(-gate_logits)  # log (1 - w_t)
        vocab_part = log_p_vocab + log_keep.unsqueeze(-1)
        attach_part = log_p_attach + log_gate.unsqueeze(-1)
        # First step: no earlier positions, the vocabulary distribution is
        # used unweighted.
        no_attach = ~has_attach
        vocab_part = torch.where(
            no_attach.expand(b, t).unsqueeze(-1), log_p_vocab, vocab_part
        )
        log_probs = torch.cat([vocab_part, attach_part], dim=-1)
        full_mask = torch.cat(
            [torch.ones(b, t, self.config.vocab_size, dtype=torch.bool, device=hidden.device),
             attach_mask.expand(b, t, t)],
            dim=-1,
        )
        return log_probs, full_mask

    def loss(self, batch: dict[str, torch.Tensor]) -> torch.Tensor:
        """Token-level cross entropy of the target index inside the
        concatenated distribution; pointer targets index position slots."""
        log_probs, _ = self.step_log_probs(batch)
        targets = batch["targets"]
        valid = targets >= 0
        safe_targets = targets.clamp(min=0)
        # A pointer target 514 + (p - 1) lands at concat slot vocab + p - 1,
        # which scores decoder position p. Slot vocab + j scores position
        # j + 1, so shift pointer indices down by one... they already align:
        # concat slot vocab + (p - 1) == attach column p - 1 + vocab? No:
        # attach columns are decoder positions 0..T-1, so position p sits at
        # column p. Shift targets accordingly.
        ptr = safe_targets >= self.config.vocab_size
        safe_targets = torch.where(ptr, safe_targets + 1, safe_targets)
        picked = log_probs.gather(-1, safe_targets.unsqueeze(-1)).squeeze(-1)
        return -(picked * valid).sum() / valid.sum()
