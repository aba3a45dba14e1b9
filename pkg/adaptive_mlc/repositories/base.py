from typing import Protocol

from adaptive_mlc.models.tensors import Checkpoint


class ICheckpointRepository(Protocol):
    """체크포인트 저장소 인터페이스 (Repository Pattern Protocol)"""

    def save(self, name: str, checkpoint: Checkpoint) -> None:
        """
        체크포인트 저장 (같은 이름이 있으면 덮어씀)

        Args:
            name (str): 체크포인트 이름 (예: "best", "last")
            checkpoint (Checkpoint): 저장할 모델/임계값/진행 상태 묶음
        """
        ...

    def load(self, name: str) -> Checkpoint:
        """
        체크포인트 조회

        Raises:
            CheckpointNotFoundError: 해당 이름의 체크포인트가 없을 때
        """
        ...

    def exists(self, name: str) -> bool:
        ...
