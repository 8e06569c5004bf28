"""Hedgehog hypergraph Ramsey toolkit.

Generators and lifts for lower-bound colourings, the polynomial 2-colour
hedgehog finder, extraction lemmas with a 3-colour pipeline, and exact
machine-checkable certificate verifiers, all over a shared dense colouring
substrate with a reproducible CLI.
"""

from .core import (
    BLUE,
    COLOUR_NAMES,
    CliqueWitness,
    CompleteColouring,
    GREEN,
    HedgehogEmbedding,
    HedgehogShape,
    InfeasibleSpec,
    InvalidArgument,
    PreconditionViolated,
    RED,
    RefusedInstance,
    SearchReport,
    StagedFailure,
    ToolkitError,
    YELLOW,
    degeneracy,
    hedgehog_edges,
    hedgehog_shape,
    rank_subset,
    read_colouring,
    unrank_subset,
    write_colouring,
)

__version__ = "0.1.0"
