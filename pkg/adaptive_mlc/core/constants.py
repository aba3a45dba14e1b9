"""
애플리케이션 전역에서 사용되는 수치 상수를 정의합니다.
"""

import numpy as np

# IDF 분모, KNN 행 정규화, 로짓 표준화에 공통으로 쓰는 ε
DEFAULT_EPSILON = 1e-12

# IDF는 자연로그 기준 (컴파일 타임 상수로만 변경)
IDF_LOG = np.log

# 마진 손실 기본값 (Δ, λ_m)
DEFAULT_MARGIN = 0.1
DEFAULT_MARGIN_WEIGHT = 0.1

# 학습 프로토콜 기본값
DEFAULT_BATCH_SIZE = 128
DEFAULT_MAX_EPOCHS = 1500
DEFAULT_PATIENCE = 20
DEFAULT_LEARNING_RATE = 1e-3
DEFAULT_HIDDEN_DIM = 256

# 평가 시점 KNN 신호 (참조 집합 크기, 이웃 수)
DEFAULT_EVAL_K = 10
DEFAULT_REFERENCE_SIZE = 2048

# 은닉층 활성화 함수 이름 (relu 고정)
ACTIVATION = "relu"

# Adam 계열 옵티마이저 기본 모멘트 계수
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8

# 학습 변형(variant) 실행 순서: 요약 표의 행 순서와 동일
VARIANT_ORDER = ("adaptive", "knn_only", "idf_only", "static")

# 체크포인트 저장소 안의 이름 (<name>.npz)
BEST_CHECKPOINT = "best"
LAST_CHECKPOINT = "last"
