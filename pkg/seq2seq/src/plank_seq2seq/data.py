"""Dataset loading and batching.

Consumes the schema-v1 JSONL emitted by the plankforge dataset builder.
Decoder inputs are the output tokens shifted right behind a start marker;
pointer tokens carry the value bin of their (transitively resolved) target
so they embed with the attached face's value. Targets index the
concatenated distribution: 0..511 value bins, 512 EOS, and 514 + (p - 1)
for a pointer to output position p.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from plankforge.codec import (
    KIND_EOS,
    KIND_PTR,
    KIND_SOS,
    KIND_VAL,
    SequenceSample,
    VOCAB_EOS,
    VOCAB_SIZE,
    sample_from_json,
)

from .config import ModelConfig

TARGET_PAD = -100


def resolved_bins(output_tokens) -> list[int]:
    """Value bin per output position (post-SOS); pointers inherit their
    target's bin transitively."""
    bins: list[int] = []
    for tok in output_tokens:
        if tok.kind == KIND_VAL:
            bins.append(tok.arg)
        elif tok.kind == KIND_PTR:
            bins.append(bins[tok.arg - 1])
        else:
            bins.append(0)
    return bins


@dataclass
class EncodedSample:
    sample_id: str
    scale_mm_per_unit: float
    enc: dict[str, np.ndarray]
    dec: dict[str, np.ndarray]
    targets: np.ndarray


def encode_for_model(sample: SequenceSample, config: ModelConfig) -> EncodedSample:
    if len(sample.input) > config.max_input_len:
        raise ValueError(
            f"sample {sample.id}: input length {len(sample.input)} exceeds "
            f"configured maximum {config.max_input_len}"
        )
    enc = {
        "bin": np.array([t.value_bin for t in sample.input], dtype=np.int64),
        "view": np.array([t.view for t in sample.input], dtype=np.int64),
        "edge": np.array([t.edge_idx for t in sample.input], dtype=np.int64),
        "coord": np.array([t.coord_idx for t in sample.input], dtype=np.int64),
        "vis": np.array([t.vis_type for t in sample.input], dtype=np.int64),
    }
    if enc["edge"].size and enc["edge"].max() >= config.max_edges_per_view:
        raise ValueError(f"sample {sample.id}: edge index beyond table size")

    tokens = list(sample.output)
    if not tokens or tokens[0].kind != KIND_SOS or tokens[-1].kind != KIND_EOS:
        raise ValueError(f"sample {sample.id}: output must be SOS ... EOS")
    body = tokens[1:]  # g_1 .. g_T with g_T = EOS
    if len(body) > config.max_output_len:
        raise ValueError(f"sample {sample.id}: output too long")
    bins = resolved_bins(body)

    steps = len(body)
    dec = {
        "bin": np.zeros(steps, dtype=np.int64),
        "plank": np.zeros(steps, dtype=np.int64),
        "face": np.zeros(steps, dtype=np.int64),
        "is_sos": np.zeros(steps, dtype=np.int64),
    }
    targets = np.zeros(steps, dtype=np.int64)
    dec["is_sos"][0] = 1
    for k in range(steps):
        if k > 0:
            prev = body[k - 1]
            dec["bin"][k] = bins[k - 1]
            dec["plank"][k] = prev.plank_idx
            dec["face"][k] = prev.face_idx
        tok = body[k]
        if tok.kind == KIND_VAL:
            targets[k] = tok.arg
        elif tok.kind == KIND_EOS:
            targets[k] = VOCAB_EOS
        elif tok.kind == KIND_PTR:
            targets[k] = VOCAB_SIZE + tok.arg - 1
        else:
            raise ValueError(f"sample {sample.id}: stray token kind {tok.kind}")
        if dec["plank"][k] >= config.max_cuboids:
            raise ValueError(f"sample {sample.id}: cuboid index beyond table size")
    return EncodedSample(
        sample_id=sample.id,
        scale_mm_per_unit=sample.scale_mm_per_unit,
        enc=enc,
        dec=dec,
        targets=targets,
    )


class TokenDataset:
    def __init__(self, samples: list[EncodedSample]):
        if not samples:
            raise ValueError("empty dataset")
        self.samples = samples

    def __len__(self) -> int:
        return len(self.samples)

    @classmethod
    def load(cls, paths: list[str | Path], config: ModelConfig) -> "TokenDataset":
        samples = []
        for path in paths:
            for line in Path(path).read_text().splitlines():
                if line.strip():
                    samples.append(encode_for_model(sample_from_json(line), config))
        return cls(samples)


def collate(samples: list[EncodedSample], device: str = "cpu") -> dict[str, torch.Tensor]:
    b = len(samples)
    lin = max(s.enc["bin"].size for s in samples)
    lout = max(s.targets.size for s in samples)
    batch = {
        name: torch.zeros(b, lin, dtype=torch.long)
        for name in ("enc_bin", "enc_view", "enc_edge", "enc_coord", "enc_vis")
    }
    batch.update(
        {
            name: torch.zeros(b, lout, dtype=torch.long)
            for name in ("dec_bin", "dec_plank", "dec_face", "dec_is_sos")
        }
    )
    batch["enc_pad"] = torch.ones(b, lin, dtype=torch.bool)
    batch["dec_pad"] = torch.ones(b, lout, dtype=torch.bool)
    batch["targets"] = torch.full((b, lout), TARGET_PAD, dtype=torch.long)
    for i, s in enumerate(samples):
        n = s.enc["bin"].size
        for name in ("bin", "view", "edge", "coord", "vis"):
            batch[f"enc_{name}"][i, :n] = torch.from_numpy(s.enc[name])
        batch["enc_pad"][i, :n] = False
        t = s.targets.size
        for name in ("bin", "plank", "face", "is_sos"):
            batch[f"dec_{name}"][i, :t] = torch.from_numpy(s.dec[name])
        batch["dec_pad"][i, :t] = False
        batch["targets"][i, :t] = torch.from_numpy(s.targets)
    return {k: v.to(device) for k, v in batch.items()}
