"""
테스트 공용 오라클

- central_difference: 스칼라 함수의 중앙 차분 기울기
- brute_force_knn: 삼중 루프로 계산한 배치 soft-KNN
- relative_error: |a-b| / max(1, |a|, |b|)
"""

from typing import Callable

import numpy as np

FD_STEP = 1e-4


def central_difference(f: Callable[[], float], array: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    """array를 제자리에서 흔들며 f()의 기울기를 계산합니다 (호출 후 원래 값으로 복원)."""
    grad = np.zeros_like(array, dtype=np.float64)
    it = np.nditer(array, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        original = array[idx]
        array[idx] = original + step
        plus = f()
        array[idx] = original - step
        minus = f()
        array[idx] = original
        grad[idx] = (plus - minus) / (2 * step)
    return grad


def relative_error(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return float(np.max(np.abs(a - b) / scale)) if a.size else 0.0


def brute_force_knn(y: np.ndarray, epsilon: float) -> np.ndarray:
    b, n_labels = y.shape
    raw = [[sum(y[i, l] * y[j, l] for l in range(n_labels)) for j in range(b)] for i in range(b)]
    out = np.zeros((b, n_labels))
    for i in range(b):
        row_sum = sum(y[i, l] for l in range(n_labels))
        for l in range(n_labels):
            out[i, l] = sum(raw[i][j] / (row_sum + epsilon) * y[j, l] for j in range(b))
    return out
