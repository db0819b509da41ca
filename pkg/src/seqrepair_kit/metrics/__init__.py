from .accuracy import cfg_validity_rate, order_accuracy, sequence_accuracy
from .bleu import bleu4
from .diagnostics import (
    LossRatioResult,
    critic_accuracy,
    export_filter_weights,
    hoyer_sparsity,
    loss_ratio_diagnostic,
    mean_filter_sparsity,
)
from .report import EvalReport, write_table
