from adaptive_mlc.repositories.base import ICheckpointRepository
from adaptive_mlc.repositories.memory import MemoryCheckpointRepository
from adaptive_mlc.repositories.npz_repository import NpzCheckpointRepository

__all__ = ["ICheckpointRepository", "MemoryCheckpointRepository", "NpzCheckpointRepository"]
