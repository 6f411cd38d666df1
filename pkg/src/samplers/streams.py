import hashlib
from typing import Dict, Optional, Sequence

import numpy as np

# Purposes keep the Langevin noise, minibatch indices and initial draws of one
# trial in separate counter-based streams.
LANGEVIN = 0
MINIBATCH = 1
INIT = 2

_UINT64 = (1 << 64) - 1


class TrialStreams:
    # Keyed random streams for one trial. The Philox key is (trial_seed, purpose) and
    # the iteration sits in a counter word, so the draws for a given
    # (trial, iteration, purpose) never depend on what else was drawn before.
    # Two samplers run with the same trial seed therefore see identical noise.

    def __init__(self, trial_seed: int, fingerprint: Optional["NoiseFingerprint"] = None) -> None:
        self.trial_seed = int(trial_seed)
        self.fingerprint = fingerprint

    def generator(self, purpose: int, iteration: int) -> np.random.Generator:
        key = np.array([self.trial_seed & _UINT64, purpose], dtype=np.uint64)
        counter = np.array([0, 0, iteration, 0], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key, counter=counter))

    def langevin(self, iteration: int) -> np.random.Generator:
        return self.generator(LANGEVIN, iteration)

    def minibatch(self, iteration: int) -> np.random.Generator:
        return self.generator(MINIBATCH, iteration)

    def init(self) -> np.random.Generator:
        return self.generator(INIT, 0)

    def langevin_noise(self, iteration: int, shape) -> np.ndarray:
        return self.langevin(iteration).standard_normal(shape)

    def minibatch_indices(self, iteration: int, num_agents: int, local_n: int, batch: int) -> np.ndarray:
        # One row of sample indices per agent, recorded when a fingerprint is attached.
        idx = self.minibatch(iteration).integers(0, local_n, size=(num_agents, batch))
        if self.fingerprint is not None:
            self.fingerprint.update_minibatch(iteration, idx)
        return idx


class NoiseFingerprint:
    # Running SHA-256 over every Langevin draw a sampler consumed, plus one digest
    # per minibatch key. Samplers consume different minibatch keys (DIGing
    # evaluates at x^(k+1), DE-SGLD at x^(k)), so those are kept per key.

    def __init__(self, trial_seed: int) -> None:
        self._hash = hashlib.sha256(f"philox:{int(trial_seed)}".encode("utf-8"))
        self.batches: Dict[int, str] = {}

    def update(self, iteration: int, noise: np.ndarray) -> None:
        self._hash.update(iteration.to_bytes(8, "little"))
        self._hash.update(np.ascontiguousarray(noise).tobytes())

    def update_minibatch(self, iteration: int, indices: np.ndarray) -> None:
        digest = hashlib.sha256(int(iteration).to_bytes(8, "little"))
        digest.update(np.ascontiguousarray(indices, dtype=np.int64).tobytes())
        self.batches[int(iteration)] = digest.hexdigest()

    def hexdigest(self) -> str:
        return self._hash.hexdigest()


def first_batch_mismatch(batches: Sequence[Dict[int, str]]) -> Optional[int]:
    """Return the first minibatch key the samplers share but drew differently, or None."""
    if len(batches) < 2:
        return None
    shared = set(batches[0])
    for digests in batches[1:]:
        shared &= set(digests)
    for key in sorted(shared):
        if len({digests[key] for digests in batches}) != 1:
            return key
    return None
