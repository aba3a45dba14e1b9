from adaptive_mlc.exception.training.training_exception import CheckpointNotFoundError
from adaptive_mlc.models.tensors import Checkpoint
from adaptive_mlc.repositories.base import ICheckpointRepository


class MemoryCheckpointRepository(ICheckpointRepository):
    """
    In-Memory 체크포인트 저장소

    Note:
        저장/조회 모두 복사본을 주고받으므로 학습 루프가 파라미터를 제자리 갱신해도
        저장된 스냅샷은 바뀌지 않습니다. 프로세스 종료 시 데이터가 사라집니다.
    """

    def __init__(self):
        self._data: dict[str, Checkpoint] = {}

    def save(self, name: str, checkpoint: Checkpoint) -> None:
        self._data[name] = checkpoint.copy()

    def load(self, name: str) -> Checkpoint:
        if name not in self._data:
            raise CheckpointNotFoundError(f"체크포인트를 찾을 수 없습니다: {name}")
        return self._data[name].copy()

    def exists(self, name: str) -> bool:
        return name in self._data
