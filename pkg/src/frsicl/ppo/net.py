"""Small tanh MLP with three heads (sensor logits, velocity-bin logits,
value), hand-rolled forward pass over plain numpy arrays."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

N_VELOCITY_BINS = 5
VELOCITY_FRACTIONS = np.array([0.0, 0.25, 0.5, 0.75, 1.0])

# Flat serialization order for parameters (row-major within each array).
PARAM_ORDER = ("W1", "b1", "W2", "b2", "Ws", "bs", "Wv", "bv", "Wc", "bc")


@dataclass
class MlpParams:
    n_sensors: int
    input_dim: int
    hidden: Tuple[int, int]
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    Ws: np.ndarray  # sensor head
    bs: np.ndarray
    Wv: np.ndarray  # velocity head
    bv: np.ndarray
    Wc: np.ndarray  # value head
    bc: np.ndarray

    def arrays(self) -> Dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in PARAM_ORDER}

    def to_flat(self) -> np.ndarray:
        return np.concatenate([getattr(self, n).ravel() for n in PARAM_ORDER])

    def set_flat(self, flat: np.ndarray) -> None:
        offset = 0
        for name in PARAM_ORDER:
            arr = getattr(self, name)
            arr[...] = flat[offset:offset + arr.size].reshape(arr.shape)
            offset += arr.size

    def n_params(self) -> int:
        return sum(getattr(self, n).size for n in PARAM_ORDER)


def init_params(n_sensors: int, input_dim: int, hidden: Tuple[int, int],
                rng: np.random.Generator) -> MlpParams:
    """Xavier-scaled gaussian init suited to tanh activations."""
    h1, h2 = hidden

    def xavier(n_in, n_out):
        return rng.normal(0.0, np.sqrt(2.0 / (n_in + n_out)), size=(n_in, n_out))

    return MlpParams(
        n_sensors=n_sensors,
        input_dim=input_dim,
        hidden=(h1, h2),
        W1=xavier(input_dim, h1), b1=np.zeros(h1),
        W2=xavier(h1, h2), b2=np.zeros(h2),
        Ws=xavier(h2, n_sensors), bs=np.zeros(n_sensors),
        Wv=xavier(h2, N_VELOCITY_BINS), bv=np.zeros(N_VELOCITY_BINS),
        Wc=xavier(h2, 1), bc=np.zeros(1),
    )


def zeros_like_params(params: MlpParams) -> Dict[str, np.ndarray]:
    return {name: np.zeros_like(arr) for name, arr in params.arrays().items()}


def forward(params: MlpParams, features: np.ndarray):
    """Return (sensor_logits, velocity_logits, value) plus the cache needed
    for backprop. Accepts a single feature vector or a (B, F) batch."""
    X = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if X.shape[1] != params.input_dim:
        raise ValueError(
            f"feature dim {X.shape[1]} does not match params input_dim {params.input_dim}")
    h1 = np.tanh(X @ params.W1 + params.b1)
    h2 = np.tanh(h1 @ params.W2 + params.b2)
    ls = h2 @ params.Ws + params.bs
    lv = h2 @ params.Wv + params.bv
    value = (h2 @ params.Wc + params.bc).ravel()
    cache = (X, h1, h2)
    return ls, lv, value, cache


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def sample_action(sensor_logits: np.ndarray, velocity_logits: np.ndarray,
                  rng: np.random.Generator):
    """Independent categorical draw per head; returns indices and the joint
    log-probability of the sampled pair."""
    lp_s = log_softmax(sensor_logits.ravel())
    lp_v = log_softmax(velocity_logits.ravel())
    a_s = int(rng.choice(len(lp_s), p=np.exp(lp_s)))
    a_v = int(rng.choice(len(lp_v), p=np.exp(lp_v)))
    return a_s, a_v, float(lp_s[a_s] + lp_v[a_v])


def velocity_from_bin(bin_index: int, v_max: float) -> float:
    return float(VELOCITY_FRACTIONS[bin_index] * v_max)
