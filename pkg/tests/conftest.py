"""Shared fixtures: seeded generators and random physical objects."""

from __future__ import annotations

import numpy as np
import pytest

from tcxy.model import (
    FrozenSector,
    ModelParams,
    QubitInitState,
    StateVector,
    coherent_weights,
    initial_state,
    preset,
)

SEED = 20250815


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(SEED)


def random_qubit_state(rng: np.random.Generator) -> QubitInitState:
    """Haar-ish random normalized two-qubit amplitude vector."""
    z = rng.normal(size=4) + 1j * rng.normal(size=4)
    z /= np.linalg.norm(z)
    return QubitInitState(*z)


def random_params(rng: np.random.Generator, max_delta: float = 1.5) -> ModelParams:
    """Random admissible couplings; lambda1 kept away from zero."""
    return ModelParams.from_detuning(
        delta=float(rng.uniform(-max_delta, max_delta)),
        lambda1=float(rng.uniform(0.2, 2.0)),
        lambda2=float(rng.uniform(0.0, 2.0)),
    )


def random_state_vector(rng: np.random.Generator, nmax: int | None = None) -> StateVector:
    """Normalized random state over all manifolds plus the frozen sector."""
    if nmax is None:
        nmax = int(rng.integers(3, 40))
    blocks = rng.normal(size=(4, nmax + 1)) + 1j * rng.normal(size=(4, nmax + 1))
    frozen = rng.normal(size=4) + 1j * rng.normal(size=4)
    scale = np.sqrt(np.sum(np.abs(blocks) ** 2) + np.sum(np.abs(frozen) ** 2))
    blocks /= scale
    frozen /= scale
    return StateVector(
        nmax=nmax,
        A=blocks[0],
        B=blocks[1],
        C=blocks[2],
        D=blocks[3],
        frozen=FrozenSector(*frozen),
    )


def fresh_state(name: str, nbar: float, frozen_sector: bool = True) -> StateVector:
    """Preset qubits in a coherent field, the standard trajectory start."""
    return initial_state(preset(name), coherent_weights(np.sqrt(nbar)), frozen_sector)
