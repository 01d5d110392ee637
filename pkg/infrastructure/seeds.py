import numpy as np

from .logger import get_logger

logger = get_logger(__name__)

_SEED_MASK = (1 << 63) - 1


def derive_seed(master_seed: int, *coordinates: int) -> int:
	"""
	Derives an independent seed from a master seed and integer coordinates
	(cell indices, trial index, instance index, ...). Counter-based, so any
	evaluation order gives the same seed for the same coordinates.

	Args
		master_seed: non-negative master seed
			int
		coordinates: non-negative integers identifying the work unit
			int

	Return
		seed: 63-bit seed
			int

	"""
	if master_seed < 0 or any(c < 0 for c in coordinates):
		logger.error("Error: negative seed material %s %s", master_seed, coordinates)
		raise ValueError("seed material must be non-negative")
	sequence = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(c) for c in coordinates))
	state = sequence.generate_state(2, dtype=np.uint32)
	return ((int(state[0]) << 32) | int(state[1])) & _SEED_MASK


def make_rng(seed: int) -> np.random.Generator:
	return np.random.default_rng(int(seed))
