"""Model and training configuration."""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class ModelConfig:
    d_model: int = 512
    ff_dim: int = 1024
    heads: int = 8
    encoder_layers: int = 6
    decoder_layers: int = 6
    dropout: float = 0.1
    vocab_size: int = 514  # 512 value bins + EOS + SOS
    max_edges_per_view: int = 300
    max_cuboids: int = 24  # bbox + planks, with headroom for the EOS marker
    max_input_len: int = 1200
    max_output_len: int = 146

    def __post_init__(self):
        if self.d_model % self.heads != 0:
            raise ValueError("d_model must be divisible by heads")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelConfig":
        return cls(**doc)


def paper_config() -> ModelConfig:
    """Full-size configuration (512-wide, 6+6 layers)."""
    return ModelConfig()


def toy_config() -> ModelConfig:
    """Desk-scale configuration for CPU training runs."""
    return ModelConfig(
        d_model=128,
        ff_dim=256,
        heads=4,
        encoder_layers=3,
        decoder_layers=3,
        dropout=0.1,
    )


def tiny_config() -> ModelConfig:
    """Unit-test sized model."""
    return ModelConfig(
        d_model=32,
        ff_dim=64,
        heads=2,
        encoder_layers=1,
        decoder_layers=1,
        dropout=0.0,
        max_input_len=256,
        max_output_len=80,
    )


@dataclass(frozen=True)
class TrainConfig:
    steps: int = 20_000
    batch_size: int = 16
    lr: float = 1e-4
    seed: int = 0
    log_every: int = 100
    grad_clip: float = 1.0
    device: str = "cpu"

    def to_dict(self) -> dict:
        return asdict(self)
