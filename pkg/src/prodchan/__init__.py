"""Numerics for finite-dimensional bipartite channels that preserve product states."""

from .channels import (
    ChoiMatrix,
    KrausChannel,
    apply,
    channel_distance,
    choi,
    choi_to_kraus,
    compose,
    contractive_channel,
    fixed_a_channel,
    fixed_b_channel,
    flip_channel,
    identity_channel,
    partial_trace_channel,
    tensor_channel,
    unitary_channel,
    validate,
)
from .classifier import (
    Classification,
    FormFit,
    check_proposition1,
    classify,
    probe_outputs,
    verify_preservation,
)
from .corpus import CorpusEntry, generate, noise_zoo, random_channel
from .errors import ProdChanError
from .linalg import eigh, partial_trace_a, partial_trace_b, swap_operator, tensor, trace_norm
from .states import (
    DensityMatrix,
    is_product,
    marginals,
    mutual_information,
    probe_basis,
    product_distance,
    random_density,
    random_pure_product,
)

__version__ = "0.1.0"
