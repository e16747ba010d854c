"""Python bindings for the lif core library."""

from ._lif import (
    FormatError,
    IoError,
    ValidationError,
    borda_count,
    cosine_similarity,
    eer,
    fdr,
    fmr100,
    generate_dataset,
    label_identities,
    read_matrix,
    toy_direction,
    toy_embed,
    toy_latents,
    train_boundaries,
    train_linear_svm,
    verify,
    write_matrix,
)

__all__ = [
    "FormatError",
    "IoError",
    "ValidationError",
    "borda_count",
    "cosine_similarity",
    "eer",
    "fdr",
    "fmr100",
    "generate_dataset",
    "label_identities",
    "read_matrix",
    "toy_direction",
    "toy_embed",
    "toy_latents",
    "train_boundaries",
    "train_linear_svm",
    "verify",
    "write_matrix",
]
