"""Length-generalization transfer experiments: tasks, training and evaluation."""

from ._lenxfer import (
    ConfigError,
    CorruptCheckpoint,
    MazeParseError,
    NonFiniteLoss,
    canonical_config,
    decode,
    encode,
    evaluate_checkpoint,
    generalization_gap,
    learning_rate,
    sample,
    shortest_path,
    solve,
    test_instance,
    train,
    validate_dfs_trace,
    vocab_size,
    vocab_tokens,
)

__all__ = [
    "ConfigError",
    "CorruptCheckpoint",
    "MazeParseError",
    "NonFiniteLoss",
    "canonical_config",
    "decode",
    "encode",
    "evaluate_checkpoint",
    "generalization_gap",
    "learning_rate",
    "sample",
    "shortest_path",
    "solve",
    "test_instance",
    "train",
    "validate_dfs_trace",
    "vocab_size",
    "vocab_tokens",
]
