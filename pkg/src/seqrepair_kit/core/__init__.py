from .exceptions import (
    CheckpointError,
    ConfigurationError,
    ContractViolation,
    DataError,
    GradientCheckError,
    SeqRepairError,
    TokenIndexError,
    TrainingDivergedError,
    UnsupportedGrammarError,
)
from .tensor import Tensor, default_dtype, no_grad
from .functional import cross_entropy, softmax
from .optim import Adam, AdamConfig, RMSprop, RMSpropConfig, adam_step, clip_weights, rmsprop_step
from .gradcheck import grad_check
from .models import ModelKind, RegMode, Task, TrainConfig, load_config
