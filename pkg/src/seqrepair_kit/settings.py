"""Module containing all library constants.

This module centralizes the constant values used across the kit: framework
token ids, numeric floors and the defaults taken from the training recipe.
"""

from typing import Dict, Tuple
from pathlib import Path

# Package Information
APP_NAME: str = "seqrepair-kit"
APP_VERSION: str = "0.1.0"

# File Paths
PACKAGE_DIR: Path = Path(__file__).parent
CONFIGS_DIR: Path = PACKAGE_DIR.parent.parent / "configs"

# Framework special tokens
PAD_ID: int = 0
SOS_ID: int = 1
EOS_ID: int = 2
TASK_OFFSET: int = 3

# Numerics
PROB_FLOOR: float = 1e-12
MASK_NEG: float = -1e9
GRADCHECK_STEP: float = 1e-5

# Optimizer constants (only learning rates are tuned)
RMSPROP_RHO: float = 0.9
ADAM_BETAS: Tuple[float, float] = (0.9, 0.999)
OPTIM_EPS: float = 1e-8

# Checkpoint format
CHECKPOINT_MAGIC: bytes = b"RGAN"
CHECKPOINT_VERSION: int = 1

# Output files
FILE_NAMES: Dict[str, str] = {
    "train_good": "train_good.txt",
    "train_bad": "train_bad.txt",
    "test_good": "test_good.txt",
    "test_bad": "test_bad.txt",
    "metadata": "metadata.json",
    "pretrain_checkpoint": "pretrain.ckpt",
    "pretrain_metrics": "pretrain_metrics.csv",
    "train_checkpoint": "train.ckpt",
    "train_metrics": "train_metrics.csv",
    "eval_report": "eval_report.csv",
    "loss_ratio": "loss_ratio_depth{depth}.csv",
    "filter_weights": "filter_weights_depth{depth}.csv",
}

# Float format used for every CSV so reruns are byte-identical
CSV_FLOAT_FORMAT: str = "%.8g"
